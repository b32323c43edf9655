use thiserror::Error;

use crate::mode::Mode;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("photon {0} appears in both factors of a tensor product")]
    LabelCollision(u8),
    #[error("invalid photon pair ({0}, {1})")]
    InvalidPair(u8, u8),
    #[error("unknown Bell state kind `{0}`")]
    InvalidBellKind(String),
    #[error("GHZ state needs at least two photons, got {0}")]
    TooFewPhotons(usize),
    #[error("photon {0} not present in state")]
    UnknownPhoton(u8),
    #[error("angle {0}° outside [0°, 180°)")]
    AngleOutOfRange(f64),
    #[error("negative mixture weight {0}")]
    NegativeWeight(f64),
    #[error("mixture weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("empty mixture")]
    EmptyMixture,
    #[error("states do not share photon labels and modes")]
    IncompatibleStates,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(&'static str),
    #[error("state has no amplitude")]
    ZeroState,
    #[error("photons do not occupy one fixed mode each; post-select first")]
    ModesNotFixed,
    #[error("no photon in PBS input modes {0} or {1}")]
    Routing(Mode, Mode),
    #[error("mode {0} does not hold exactly one photon in every term")]
    ModeOccupancy(Mode),
    #[error("zero-probability outcome: {0}")]
    ImpossibleOutcome(&'static str),
    #[error("distinguishability {0} outside [0, 1]")]
    DistinguishabilityRange(f64),
    #[error("visibility ceiling {0} outside [0, 1]")]
    VisibilityRange(f64),
    #[error("coherence time must be positive, got {0} fs")]
    CoherenceTime(f64),
    #[error("PBS error rate {0} outside [0, 1)")]
    PbsErrorRate(f64),
    #[error("state is not a two-branch GHZ superposition ({0} terms)")]
    NotTwoBranch(usize),
    #[error("invalid apparatus: {0}")]
    Apparatus(String),
    #[error("invalid measurement setting: {0}")]
    Setting(String),
    #[error("invalid rate model: {0}")]
    RateModel(String),
    #[error("zero four-fold rate; the measurement never completes")]
    InfiniteDuration,
    #[error("no counts in the selected outcomes")]
    NoCounts,
    #[error("unknown outcome key `{0}`")]
    UnknownOutcome(String),
    #[error("expected a {expected}-photon state, got {got}")]
    PhotonCount { expected: usize, got: usize },
    #[error("invalid mode tag `{0}`")]
    ModeTag(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
