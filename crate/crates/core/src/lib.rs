//! Simulation of four-photon GHZ entanglement and entanglement swapping with
//! two down-conversion pair sources, a polarizing beam-splitter and four-fold
//! coincidence post-selection.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`). The crate root
//! re-exports `f64` aliases for everyday use and `f32` aliases with a `32`
//! suffix.
//!
//! ```
//! use ghz_core::{Apparatus, MeasurementSetting, DelayElement, exact_outcome_probabilities};
//!
//! let setup = Apparatus::four_photon_ghz();
//! let hv = MeasurementSetting::hv(&setup);
//! let p = exact_outcome_probabilities(&setup, &hv, &DelayElement::at(0.0), 1.0).unwrap();
//! assert!((p[&"HVVH".parse().unwrap()] - 0.5).abs() < 1e-12);
//! ```

pub mod config;
pub mod density;
pub mod error;
pub mod experiment;
pub mod mode;
pub mod montecarlo;
pub mod optics;
pub mod report;
pub mod scalar;
pub mod state;
pub mod states;
pub mod swap;

pub use config::SimConfig;
pub use density::{fidelity, mix};
pub use error::{Error, Result};
pub use experiment::{
    exact_correlation, exact_outcome_probabilities, outcome_probabilities, postselect_fourfold, three_photon_ghz,
    Outcome, PairSource, Symbol,
};
pub use mode::{Mode, PhotonLabel, Pol};
pub use montecarlo::{delay_scan, expected_rates, feasibility_estimate, monte_carlo_counts, CountTable, RateModel};
pub use optics::{
    apply_pbs, apply_polarizer, dephase_by_distinguishability, distinguishability, Branch, OverlapProfile,
};
pub use scalar::Real;
pub use state::{Ket, Slot};
pub use states::{bell_state, ghz_state, spdc_pair, BellKind, GhzPattern};
pub use swap::{
    bell_decompose, chsh_value, phi_plus_via_45_coincidence, project_bell, via_45_coincidence, visibility_from_counts,
    ChshAngles, Coincidence, SwapReport,
};

pub type PureState = state::PureState<f64>;
pub type DensityMatrix = density::DensityMatrix<f64>;
pub type Apparatus = experiment::Apparatus<f64>;
pub type Element = experiment::Element<f64>;
pub type MeasurementSetting = experiment::MeasurementSetting<f64>;
pub type PbsElement = optics::PbsElement<f64>;
pub type PolarizerElement = optics::PolarizerElement<f64>;
pub type DelayElement = optics::DelayElement<f64>;
pub type BellDecomposition = swap::BellDecomposition<f64>;
pub type SwapResult = swap::SwapResult<f64>;

pub type PureState32 = state::PureState<f32>;
pub type DensityMatrix32 = density::DensityMatrix<f32>;
pub type Apparatus32 = experiment::Apparatus<f32>;
pub type MeasurementSetting32 = experiment::MeasurementSetting<f32>;
pub type DelayElement32 = optics::DelayElement<f32>;
pub type SwapResult32 = swap::SwapResult<f32>;
