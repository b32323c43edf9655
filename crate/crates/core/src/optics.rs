//! Beam-splitter, polarizer and delay line acting on mode-labeled states.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::density::{mix, DensityMatrix};
use crate::error::{Error, Result};
use crate::mode::{Mode, Pol};
use crate::scalar::{Real, C};
use crate::state::{Ket, PureState, Slot};

/// Polarizing beam-splitter: transmits H, reflects V.
///
/// H from `input_modes.0` and V from `input_modes.1` leave through
/// `output_modes.0`; the other two combinations leave through `output_modes.1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbsElement<T: Real> {
    pub input_modes: (Mode, Mode),
    pub output_modes: (Mode, Mode),
    /// Per-photon wrong-port probability; used by Monte Carlo runs only.
    #[serde(default)]
    pub error_rate: T,
}

impl<T: Real> PbsElement<T> {
    pub fn new(input_modes: (Mode, Mode), output_modes: (Mode, Mode)) -> Self {
        PbsElement { input_modes, output_modes, error_rate: T::zero() }
    }

    pub fn with_error_rate(mut self, rate: T) -> Result<Self> {
        if !(rate >= T::zero() && rate < T::one()) {
            return Err(Error::PbsErrorRate(rate.to_f64_lossy()));
        }
        self.error_rate = rate;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.error_rate >= T::zero() && self.error_rate < T::one()) {
            return Err(Error::PbsErrorRate(self.error_rate.to_f64_lossy()));
        }
        Ok(())
    }

    fn route(&self, slot: Slot, misrouted: bool) -> Slot {
        let (a, b) = self.input_modes;
        let (out_c, out_d) = self.output_modes;
        let (right, wrong) = match (slot.mode, slot.pol) {
            (m, Pol::H) if m == a => (out_c, out_d),
            (m, Pol::V) if m == a => (out_d, out_c),
            (m, Pol::H) if m == b => (out_d, out_c),
            (m, Pol::V) if m == b => (out_c, out_d),
            (m, _) => (m, m),
        };
        Slot { mode: if misrouted { wrong } else { right }, ..slot }
    }
}

/// Which output of a polarizer is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Projection onto `|θ⟩`.
    #[default]
    Pass,
    /// Projection onto `|θ+90°⟩`.
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizerElement<T: Real> {
    pub mode: Mode,
    /// Degrees from H, in [0, 180).
    pub angle: T,
    #[serde(default)]
    pub branch: Branch,
}

impl<T: Real> PolarizerElement<T> {
    pub fn new(mode: Mode, angle: T, branch: Branch) -> Result<Self> {
        let p = PolarizerElement { mode, angle, branch };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.angle >= T::zero() && self.angle < T::lit(180.0)) {
            return Err(Error::AngleOutOfRange(self.angle.to_f64_lossy()));
        }
        Ok(())
    }
}

/// Temporal-overlap model of the two photons meeting at the PBS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapProfile {
    /// `exp(-τ²/τc²)`
    #[default]
    Gaussian,
    /// `1 / (1 + τ²/τc²)`
    Lorentzian,
}

/// Relative delay between the photons entering the PBS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayElement<T: Real> {
    pub delay_fs: T,
    pub coherence_fs: T,
    #[serde(default)]
    pub profile: OverlapProfile,
}

pub const DEFAULT_COHERENCE_FS: f64 = 550.0;

impl<T: Real> DelayElement<T> {
    pub fn new(delay_fs: T, coherence_fs: T) -> Result<Self> {
        let d = DelayElement { delay_fs, coherence_fs, profile: OverlapProfile::Gaussian };
        d.validate()?;
        Ok(d)
    }

    /// Delay with the default 550 fs coherence time.
    pub fn at(delay_fs: T) -> Self {
        DelayElement { delay_fs, coherence_fs: T::lit(DEFAULT_COHERENCE_FS), profile: OverlapProfile::Gaussian }
    }

    pub fn with_profile(mut self, profile: OverlapProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.coherence_fs.is_nan() || self.coherence_fs <= T::zero() || !self.delay_fs.is_finite() {
            return Err(Error::CoherenceTime(self.coherence_fs.to_f64_lossy()));
        }
        Ok(())
    }

    /// Wave-packet overlap `D(τ)`: 1 at zero delay, even, decreasing in `|τ|`.
    pub fn overlap(&self) -> T {
        let x = self.delay_fs / self.coherence_fs;
        match self.profile {
            OverlapProfile::Gaussian => (-(x * x)).exp(),
            OverlapProfile::Lorentzian => T::one() / (T::one() + x * x),
        }
    }
}

impl<T: Real> Default for DelayElement<T> {
    fn default() -> Self {
        Self::at(T::zero())
    }
}

/// Indistinguishability factor `D(τ)` of a delay setting.
pub fn distinguishability<T: Real>(delay: &DelayElement<T>) -> T {
    delay.overlap()
}

/// Routes every photon in the PBS input modes to its output mode.
///
/// Amplitudes are untouched; terms with two photons in one output are kept
/// and removed later by coincidence post-selection.
pub fn apply_pbs<T: Real>(state: &PureState<T>, pbs: &PbsElement<T>) -> Result<PureState<T>> {
    route_pbs(state, pbs, &BTreeSet::new())
}

/// PBS routing where the photons in `misrouted` leave through the wrong port.
pub(crate) fn route_pbs<T: Real>(
    state: &PureState<T>,
    pbs: &PbsElement<T>,
    misrouted: &BTreeSet<u8>,
) -> Result<PureState<T>> {
    let (a, b) = pbs.input_modes;
    let touched: BTreeSet<usize> = state
        .terms()
        .flat_map(|(k, _)| k.slots().iter().enumerate().filter(|(_, s)| s.mode == a || s.mode == b).map(|(i, _)| i))
        .collect();
    if touched.is_empty() {
        return Err(Error::Routing(a, b));
    }
    // The routing rule is defined in H/V.
    let mut s = state.clone();
    for &i in &touched {
        let photon = state.photons()[i];
        if s.basis(photon)? != T::zero() {
            s = s.rotate_unchecked(photon, T::zero())?;
        }
    }
    let photons = state.photons();
    let terms: Vec<(Ket, C<T>)> = s
        .terms()
        .map(|(k, amp)| {
            let slots = k.slots().iter().zip(photons).map(|(&slot, ph)| pbs.route(slot, misrouted.contains(ph)));
            (Ket::new(slots.collect()), *amp)
        })
        .collect();
    PureState::from_terms_in_bases(state.photons(), s.bases().to_vec(), terms)
}

/// Projects the photon in `pol.mode` onto the polarizer's branch.
///
/// Returns the renormalized state (the photon stays, now in the analyzer
/// basis) and the projection probability.
pub fn apply_polarizer<T: Real>(state: &PureState<T>, pol: &PolarizerElement<T>) -> Result<(PureState<T>, T)> {
    pol.validate()?;
    let mut inside = BTreeSet::new();
    for (k, _) in state.terms() {
        if k.occupancy(pol.mode) != 1 {
            return Err(Error::ModeOccupancy(pol.mode));
        }
        let i = k.slots().iter().position(|s| s.mode == pol.mode).expect("occupancy checked");
        inside.insert(state.photons()[i]);
    }
    let mut s = state.clone();
    for &photon in &inside {
        s = s.rotate_unchecked(photon, pol.angle)?;
    }
    let keep = match pol.branch {
        Branch::Pass => Pol::H,
        Branch::Reject => Pol::V,
    };
    let mut prob = T::zero();
    let mut terms = Vec::new();
    for (k, amp) in s.terms() {
        let slot = k.slots().iter().find(|sl| sl.mode == pol.mode).expect("occupancy checked");
        if slot.pol == keep {
            prob = prob + amp.norm_sqr();
            terms.push((k.clone(), *amp));
        }
    }
    if prob <= T::prune_tol() * T::prune_tol() {
        return Err(Error::ImpossibleOutcome("polarizer blocks every term"));
    }
    let out = PureState::from_terms_in_bases(s.photons(), s.bases().to_vec(), terms)?;
    Ok((out, prob))
}

/// Splits a two-branch state `a|k₁⟩ + b|k₂⟩` into `|Ψ⟩` and its phase-flipped partner `a|k₁⟩ − b|k₂⟩`.
pub fn phase_flip_partner<T: Real>(state: &PureState<T>) -> Result<(PureState<T>, PureState<T>)> {
    let hv = state.to_hv()?;
    if hv.fixed_modes().is_none() {
        return Err(Error::ModesNotFixed);
    }
    if hv.len() != 2 {
        return Err(Error::NotTwoBranch(hv.len()));
    }
    let terms: Vec<(Ket, C<T>)> = hv.terms().map(|(k, a)| (k.clone(), *a)).collect();
    let flipped = PureState::from_terms(hv.photons(), [terms[0].clone(), (terms[1].0.clone(), -terms[1].1)])?;
    Ok((hv, flipped))
}

/// Mixed state left by imperfect two-photon interference at the PBS.
///
/// `ρ = (1 + D·V₀)/2 |Ψ⟩⟨Ψ| + (1 − D·V₀)/2 |Φ⟩⟨Φ|`, where `|Φ⟩` is `|Ψ⟩` with the
/// relative sign of its two H/V branches flipped.
pub fn dephase_by_distinguishability<T: Real>(state: &PureState<T>, d: T, v0: T) -> Result<DensityMatrix<T>> {
    if !(d >= T::zero() && d <= T::one()) {
        return Err(Error::DistinguishabilityRange(d.to_f64_lossy()));
    }
    if !(v0 >= T::zero() && v0 <= T::one()) {
        return Err(Error::VisibilityRange(v0.to_f64_lossy()));
    }
    let (psi, phi) = phase_flip_partner(state)?;
    let coherence = d * v0;
    let half = T::lit(0.5);
    mix(&[(half * (T::one() + coherence), psi), (half * (T::one() - coherence), phi)])
}
