//! Entanglement swapping: Bell-basis decomposition, Bell projections of the
//! middle pair and the conditional state of the outer pair.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::experiment::Outcome;
use crate::mode::{Mode, PhotonLabel};
use crate::montecarlo::CountTable;
use crate::scalar::{c, jones, Real, C};
use crate::state::PureState;
use crate::states::{bell_state_in_modes, BellKind};

/// Expansion of a four-photon state in products of Bell states of two pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BellDecomposition<T: Real> {
    pub pair_a: (PhotonLabel, PhotonLabel),
    pub pair_b: (PhotonLabel, PhotonLabel),
    /// `(kind on pair_a, kind on pair_b)` to amplitude.
    pub coefficients: BTreeMap<(BellKind, BellKind), C<T>>,
}

impl<T: Real> BellDecomposition<T> {
    pub fn coefficient(&self, a: BellKind, b: BellKind) -> C<T> {
        self.coefficients.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn weight_sum(&self) -> T {
        self.coefficients.values().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ c_ab |a⟩|b⟩`
    pub fn reconstruct(&self) -> Result<PureState<T>> {
        let mut photons = Vec::new();
        let mut terms = Vec::new();
        for ((ka, kb), coef) in &self.coefficients {
            let s = bell_pair::<T>(*ka, self.pair_a)?.tensor(&bell_pair(*kb, self.pair_b)?)?;
            photons = s.photons().to_vec();
            terms.extend(s.terms().map(|(k, a)| (k.clone(), *a * *coef)));
        }
        PureState::from_terms(&photons, terms)
    }
}

fn bell_pair<T: Real>(kind: BellKind, pair: (PhotonLabel, PhotonLabel)) -> Result<PureState<T>> {
    bell_state_in_modes(kind, (pair.0.index, pair.0.mode), (pair.1.index, pair.1.mode))
}

/// Coefficients `⟨a|⟨b|ψ⟩` of a four-photon state over the sixteen Bell products.
pub fn bell_decompose<T: Real>(
    state: &PureState<T>,
    pair_a: (u8, u8),
    pair_b: (u8, u8),
) -> Result<BellDecomposition<T>> {
    if state.photon_count() != 4 {
        return Err(Error::PhotonCount { expected: 4, got: state.photon_count() });
    }
    let labels = state.labels()?;
    let label = |i: u8| labels.iter().copied().find(|l| l.index == i).ok_or(Error::UnknownPhoton(i));
    let pa = (label(pair_a.0)?, label(pair_a.1)?);
    let pb = (label(pair_b.0)?, label(pair_b.1)?);
    let mut used = [pa.0.index, pa.1.index, pb.0.index, pb.1.index];
    used.sort_unstable();
    if used.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidPair(pair_a.0, pair_b.0));
    }
    let mut coefficients = BTreeMap::new();
    for ka in BellKind::ALL {
        for kb in BellKind::ALL {
            let basis = bell_pair::<T>(ka, pa)?.tensor(&bell_pair(kb, pb)?)?;
            let amp = basis.inner(state)?;
            let amp = if amp.norm() <= T::prune_tol() { C::default() } else { amp };
            coefficients.insert((ka, kb), amp);
        }
    }
    Ok(BellDecomposition { pair_a: pa, pair_b: pb, coefficients })
}

/// Conditional state of the two unmeasured photons after a Bell-type projection.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapResult<T: Real> {
    pub conditioned: DensityMatrix<T>,
    pub projection_probability: T,
    /// Bell state the remaining pair is expected in.
    pub target: BellKind,
    pub fidelity_to_target: T,
    /// 45°-basis correlation, signed so that the target state gives +1.
    pub visibility_45: T,
}

impl<T: Real> SwapResult<T> {
    fn build(conditioned: DensityMatrix<T>, projection_probability: T, target: BellKind) -> Result<Self> {
        let labels = conditioned.labels().to_vec();
        if labels.len() != 2 {
            return Err(Error::PhotonCount { expected: 2, got: labels.len() });
        }
        let target_state = bell_pair(target, (labels[0], labels[1]))?;
        let fidelity_to_target = conditioned.expectation(&target_state)?;
        let e45 = conditioned.correlation(&[T::lit(45.0), T::lit(45.0)])?;
        let sign = match target {
            BellKind::PhiPlus | BellKind::PsiPlus => T::one(),
            BellKind::PhiMinus | BellKind::PsiMinus => -T::one(),
        };
        Ok(SwapResult { conditioned, projection_probability, target, fidelity_to_target, visibility_45: sign * e45 })
    }

    /// CHSH value of the conditioned pair at the angles that maximize it for the target.
    pub fn chsh(&self) -> Result<T> {
        chsh_value(&self.conditioned, ChshAngles::for_bell(self.target))
    }
}

fn bell_vector<T: Real>(kind: BellKind) -> Vec<C<T>> {
    let h = c(T::FRAC_1_SQRT_2());
    let z = C::default();
    match kind {
        BellKind::PsiPlus => vec![z, h, h, z],
        BellKind::PsiMinus => vec![z, h, -h, z],
        BellKind::PhiPlus => vec![h, z, z, h],
        BellKind::PhiMinus => vec![h, z, z, -h],
    }
}

/// Projects the photons in `pair` onto a Bell state; the other two photons
/// are left in the returned conditional state.
pub fn project_bell<T: Real>(rho: &DensityMatrix<T>, pair: (Mode, Mode), kind: BellKind) -> Result<SwapResult<T>> {
    let (cond, p) = rho.condition_on(&[pair.0, pair.1], &bell_vector(kind))?;
    SwapResult::build(cond, p, kind)
}

/// Which 45°-basis coincidences between the two middle outputs are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coincidence {
    /// `+45/+45` or `−45/−45`
    Same,
    /// `+45/−45` or `−45/+45`
    Cross,
}

/// Operational Bell identification: 45° analyzers on both photons of `pair`
/// and a coincidence of the selected type.
///
/// On states where the pair only holds HH or VV (which is what a four-fold
/// coincidence behind the PBS leaves), `Same` acts as a `|φ⁺⟩` projection
/// and `Cross` as a `|φ⁻⟩` projection.
pub fn via_45_coincidence<T: Real>(
    rho: &DensityMatrix<T>,
    pair: (Mode, Mode),
    kind: Coincidence,
) -> Result<SwapResult<T>> {
    let [plus, minus] = [jones(T::lit(45.0)), jones(T::lit(135.0))];
    let outer = |a: [T; 2], b: [T; 2]| vec![c(a[0] * b[0]), c(a[0] * b[1]), c(a[1] * b[0]), c(a[1] * b[1])];
    let (combos, target) = match kind {
        Coincidence::Same => ([(plus, plus), (minus, minus)], BellKind::PhiPlus),
        Coincidence::Cross => ([(plus, minus), (minus, plus)], BellKind::PhiMinus),
    };
    let modes = [pair.0, pair.1];
    let (first, p1) = rho.project_on(&modes, &outer(combos[0].0, combos[0].1))?;
    let (second, p2) = rho.project_on(&modes, &outer(combos[1].0, combos[1].1))?;
    let p = p1 + p2;
    if p <= T::exact_tol() * T::exact_tol() {
        return Err(Error::ImpossibleOutcome("no accepted 45° coincidence"));
    }
    let cond = first.add(&second)?.scaled(T::one() / p);
    SwapResult::build(cond, p, target)
}

/// `+45/+45` or `−45/−45` coincidences between outputs 2′ and 3′.
pub fn phi_plus_via_45_coincidence<T: Real>(rho: &DensityMatrix<T>) -> Result<SwapResult<T>> {
    via_45_coincidence(rho, (Mode::primed(2), Mode::primed(3)), Coincidence::Same)
}

/// Analyzer angles (degrees) for a CHSH test on two photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshAngles<T> {
    pub a: T,
    pub a_prime: T,
    pub b: T,
    pub b_prime: T,
}

impl<T: Real> ChshAngles<T> {
    /// 0°, 45° against 22.5°, 67.5°: maximal violation for `|φ⁺⟩`.
    pub fn phi_plus() -> Self {
        ChshAngles { a: T::zero(), a_prime: T::lit(45.0), b: T::lit(22.5), b_prime: T::lit(67.5) }
    }

    /// Angles giving `S = 2√2` for the given Bell state.
    pub fn for_bell(kind: BellKind) -> Self {
        let (b, b_prime) = match kind {
            BellKind::PhiPlus => (22.5, 67.5),
            BellKind::PhiMinus => (157.5, 112.5),
            BellKind::PsiPlus => (67.5, 22.5),
            BellKind::PsiMinus => (112.5, 157.5),
        };
        ChshAngles { a: T::zero(), a_prime: T::lit(45.0), b: T::lit(b), b_prime: T::lit(b_prime) }
    }
}

/// Local-hidden-variable bound of the CHSH combination.
pub const CHSH_LHV_BOUND: f64 = 2.0;

/// `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)` on a two-photon state.
pub fn chsh_value<T: Real>(rho: &DensityMatrix<T>, angles: ChshAngles<T>) -> Result<T> {
    let e = |x: T, y: T| rho.correlation(&[x, y]);
    Ok(e(angles.a, angles.b)? - e(angles.a, angles.b_prime)?
        + e(angles.a_prime, angles.b)?
        + e(angles.a_prime, angles.b_prime)?)
}

/// Contrast `(N_even − N_odd)/(N_even + N_odd)` with first-order Poisson error
/// `2√(N_even N_odd / (N_even + N_odd)³)`.
pub fn visibility_from_counts(table: &CountTable, even: &[Outcome], odd: &[Outcome]) -> Result<(f64, f64)> {
    let ne = table.sum_of(even)?;
    let no = table.sum_of(odd)?;
    visibility_from_totals(ne, no)
}

pub fn visibility_from_totals(even: u64, odd: u64) -> Result<(f64, f64)> {
    let total = even + odd;
    if total == 0 {
        return Err(Error::NoCounts);
    }
    let (ne, no, n) = (even as f64, odd as f64, total as f64);
    Ok(((ne - no) / n, 2.0 * (ne * no / (n * n * n)).sqrt()))
}

/// Flat summary of a swap projection, one CSV/JSON row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapReport {
    pub projection: String,
    pub target: BellKind,
    pub probability: f64,
    pub fidelity: f64,
    pub visibility_45: f64,
    pub chsh: f64,
}

impl SwapReport {
    pub fn from_result<T: Real>(projection: &str, r: &SwapResult<T>) -> Result<Self> {
        Ok(SwapReport {
            projection: projection.to_string(),
            target: r.target,
            probability: r.projection_probability.to_f64_lossy(),
            fidelity: r.fidelity_to_target.to_f64_lossy(),
            visibility_45: r.visibility_45.to_f64_lossy(),
            chsh: r.chsh()?.to_f64_lossy(),
        })
    }
}
