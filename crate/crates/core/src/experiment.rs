//! Apparatus composition, four-fold post-selection and exact outcome probabilities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::{mix, DensityMatrix};
use crate::error::{Error, Result};
use crate::mode::{Mode, Pol};
use crate::optics::{
    apply_polarizer, dephase_by_distinguishability, route_pbs, Branch, DelayElement, PbsElement, PolarizerElement,
};
use crate::scalar::{Real, C};
use crate::state::{Ket, PureState, Slot};
use crate::states::spdc_pair_in_modes;

/// One down-conversion pass emitting a singlet on two photons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSource {
    pub photons: (u8, u8),
    pub modes: (Mode, Mode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Element<T: Real> {
    Pbs(PbsElement<T>),
    Polarizer(PolarizerElement<T>),
    Delay(DelayElement<T>),
}

pub const DEFAULT_VISIBILITY_CEILING: f64 = 0.79;

fn default_ceiling<T: Real>() -> T {
    T::lit(DEFAULT_VISIBILITY_CEILING)
}

/// Sources, optical elements in beam order, and detector assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Apparatus<T: Real> {
    pub sources: Vec<PairSource>,
    pub elements: Vec<Element<T>>,
    /// Detector id (`D1`…) to the mode it watches. Detector order is the
    /// key order; post-selected photons are numbered 1, 2, … in that order.
    pub detectors: BTreeMap<String, Mode>,
    /// Zero-delay two-branch coherence `V₀`.
    #[serde(default = "default_ceiling")]
    pub visibility_ceiling: T,
}

impl<T: Real> Apparatus<T> {
    /// Two singlet sources, one photon of each pair combined on a PBS, four detectors.
    pub fn four_photon_ghz() -> Self {
        let m = Mode::new;
        let p = Mode::primed;
        Apparatus {
            sources: vec![
                PairSource { photons: (1, 2), modes: (m(1), m(2)) },
                PairSource { photons: (3, 4), modes: (m(3), m(4)) },
            ],
            elements: vec![
                Element::Delay(DelayElement::default()),
                Element::Pbs(PbsElement::new((m(2), m(3)), (p(2), p(3)))),
            ],
            detectors: [("D1", m(1)), ("D2", p(2)), ("D3", p(3)), ("D4", m(4))]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            visibility_ceiling: default_ceiling(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Apparatus(msg));
        if self.sources.is_empty() {
            return bad("no sources".into());
        }
        let mut photons = BTreeSet::new();
        let mut occupied = BTreeSet::new();
        for s in &self.sources {
            for (ph, md) in [(s.photons.0, s.modes.0), (s.photons.1, s.modes.1)] {
                if !photons.insert(ph) {
                    return bad(format!("photon {ph} emitted twice"));
                }
                if !occupied.insert(md) {
                    return bad(format!("mode {md} fed by two sources"));
                }
            }
        }
        for (i, e) in self.elements.iter().enumerate() {
            match e {
                Element::Pbs(p) => {
                    p.validate()?;
                    let (a, b) = p.input_modes;
                    if !occupied.contains(&a) && !occupied.contains(&b) {
                        return bad(format!("element {i}: PBS inputs {a}, {b} carry no light"));
                    }
                    occupied.remove(&a);
                    occupied.remove(&b);
                    for o in [p.output_modes.0, p.output_modes.1] {
                        if !occupied.insert(o) {
                            return bad(format!("element {i}: PBS output {o} already in use"));
                        }
                    }
                }
                Element::Polarizer(p) => {
                    p.validate()?;
                    if !occupied.contains(&p.mode) {
                        return bad(format!("element {i}: polarizer mode {} carries no light", p.mode));
                    }
                }
                Element::Delay(d) => d.validate()?,
            }
        }
        if self.detectors.is_empty() {
            return bad("no detectors".into());
        }
        let mut seen = BTreeSet::new();
        for (id, m) in &self.detectors {
            if !seen.insert(*m) {
                return bad(format!("detector {id}: mode {m} watched twice"));
            }
            if !occupied.contains(m) {
                return bad(format!("detector {id}: mode {m} carries no light"));
            }
        }
        if !(self.visibility_ceiling >= T::zero() && self.visibility_ceiling <= T::one()) {
            return Err(Error::VisibilityRange(self.visibility_ceiling.to_f64_lossy()));
        }
        Ok(())
    }

    pub fn detector_ids(&self) -> Vec<&str> {
        self.detectors.keys().map(String::as_str).collect()
    }

    pub fn detector_modes(&self) -> Vec<Mode> {
        self.detectors.values().copied().collect()
    }

    /// The delay element of the chain, or zero delay if there is none.
    pub fn delay(&self) -> DelayElement<T> {
        self.elements
            .iter()
            .find_map(|e| match e {
                Element::Delay(d) => Some(d.clone()),
                _ => None,
            })
            .unwrap_or_default()
    }

    /// Copy with the delay element set to `delay_fs` (inserted at the front if absent).
    pub fn with_delay(&self, delay_fs: T) -> Self {
        let mut a = self.clone();
        match a.elements.iter_mut().find_map(|e| match e {
            Element::Delay(d) => Some(d),
            _ => None,
        }) {
            Some(d) => d.delay_fs = delay_fs,
            None => a.elements.insert(0, Element::Delay(DelayElement::at(delay_fs))),
        }
        a
    }

    /// Product of the source singlets.
    pub fn input_state(&self) -> Result<PureState<T>> {
        let mut it = self.sources.iter();
        let first = it.next().ok_or_else(|| Error::Apparatus("no sources".into()))?;
        let mut s = spdc_pair_in_modes((first.photons.0, first.modes.0), (first.photons.1, first.modes.1))?;
        for src in it {
            s = s.tensor(&spdc_pair_in_modes((src.photons.0, src.modes.0), (src.photons.1, src.modes.1))?)?;
        }
        Ok(s)
    }

    /// Propagates the input through the chain with ideal beam-splitters.
    /// Returns the state before detection and the probability that the
    /// chain's polarizers transmit.
    pub fn propagate(&self) -> Result<(PureState<T>, T)> {
        let mut s = self.input_state()?;
        let mut p = T::one();
        for e in &self.elements {
            match e {
                Element::Pbs(pbs) => s = route_pbs(&s, pbs, &BTreeSet::new())?,
                Element::Polarizer(pol) => {
                    let (next, q) = apply_polarizer(&s, pol)?;
                    s = next;
                    p = p * q;
                }
                Element::Delay(_) => {}
            }
        }
        Ok((s, p))
    }

    /// Every beam-splitter routing history, including wrong-port errors, as
    /// (probability weight, state before detection). The first entry is the
    /// error-free history.
    pub fn propagate_with_errors(&self) -> Result<Vec<(T, PureState<T>)>> {
        let mut branches = vec![(T::one(), self.input_state()?)];
        for e in &self.elements {
            let mut next = Vec::with_capacity(branches.len());
            for (w, s) in branches {
                match e {
                    Element::Pbs(pbs) => {
                        let (a, b) = pbs.input_modes;
                        let touched: Vec<u8> = s
                            .photons()
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| s.terms().any(|(k, _)| k.slots()[*i].mode == a || k.slots()[*i].mode == b))
                            .map(|(_, &ph)| ph)
                            .collect();
                        let eps = pbs.error_rate;
                        let n = touched.len();
                        for subset in 0..(1usize << n) {
                            if eps == T::zero() && subset != 0 {
                                continue;
                            }
                            let wrong: BTreeSet<u8> =
                                (0..n).filter(|j| (subset >> j) & 1 == 1).map(|j| touched[j]).collect();
                            let k = wrong.len() as i32;
                            let ws = w * eps.powi(k) * (T::one() - eps).powi(n as i32 - k);
                            next.push((ws, route_pbs(&s, pbs, &wrong)?));
                        }
                    }
                    Element::Polarizer(pol) => match apply_polarizer(&s, pol) {
                        Ok((st, q)) => next.push((w * q, st)),
                        Err(Error::ImpossibleOutcome(_)) => {}
                        Err(err) => return Err(err),
                    },
                    Element::Delay(_) => next.push((w, s)),
                }
            }
            if next.is_empty() {
                return Err(Error::ImpossibleOutcome("every history is blocked"));
            }
            branches = next;
        }
        Ok(branches)
    }

    /// Pure state conditioned on one photon per detector, photons renumbered
    /// in detector order, and its probability (including chain polarizers).
    pub fn detected_state(&self) -> Result<(PureState<T>, T)> {
        let (s, p_chain) = self.propagate()?;
        let (post, p_post) = postselect_fourfold(&s, &self.detector_modes())?;
        Ok((post, p_chain * p_post))
    }

    /// Density matrix of the detected photons for a delay and visibility ceiling.
    pub fn detected_density(&self, delay: &DelayElement<T>, v0: T) -> Result<DensityMatrix<T>> {
        delay.validate()?;
        let (state, _) = self.detected_state()?;
        coherence_limited(&state, delay.overlap(), v0)
    }
}

/// Applies the partial-distinguishability channel when the state has the
/// two-branch form; single-term states are unaffected.
fn coherence_limited<T: Real>(state: &PureState<T>, d: T, v0: T) -> Result<DensityMatrix<T>> {
    let hv = state.to_hv()?;
    match hv.len() {
        2 => dephase_by_distinguishability(&hv, d, v0),
        1 => mix(&[(T::one(), hv)]),
        _ if d * v0 == T::one() => mix(&[(T::one(), hv)]),
        n => Err(Error::NotTwoBranch(n)),
    }
}

/// Keeps terms with exactly one photon in each of `modes` (and none elsewhere).
///
/// Surviving photons are renumbered 1, 2, … in the order of `modes`; terms
/// that coincide after renumbering add coherently. Returns the normalized
/// state and the kept probability.
pub fn postselect_fourfold<T: Real>(state: &PureState<T>, modes: &[Mode]) -> Result<(PureState<T>, T)> {
    if modes.len() != state.photon_count() {
        return Err(Error::PhotonCount { expected: state.photon_count(), got: modes.len() });
    }
    let hv = state.to_hv()?;
    let mut kept: BTreeMap<Vec<Pol>, C<T>> = BTreeMap::new();
    for (ket, amp) in hv.terms() {
        if modes.iter().any(|&m| ket.occupancy(m) != 1) {
            continue;
        }
        let pols: Vec<Pol> =
            modes.iter().map(|&m| ket.slots().iter().find(|s| s.mode == m).expect("occupancy checked").pol).collect();
        let e = kept.entry(pols).or_default();
        *e = *e + *amp;
    }
    let prob: T = kept.values().map(|a| a.norm_sqr()).sum();
    if prob <= T::prune_tol() * T::prune_tol() {
        return Err(Error::ImpossibleOutcome("no term has one photon per detector"));
    }
    let photons: Vec<u8> = (1..=modes.len() as u8).collect();
    let terms = kept
        .into_iter()
        .map(|(pols, a)| (Ket::new(modes.iter().zip(&pols).map(|(&m, &p)| Slot::new(m, p)).collect()), a));
    Ok((PureState::from_terms(&photons, terms)?, prob))
}

/// Per-detector analyzer: linear-polarization basis angle, or pass-through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasurementSetting<T: Real> {
    pub analyzers: BTreeMap<String, Option<T>>,
}

impl<T: Real> MeasurementSetting<T> {
    /// Same analyzer basis in front of every detector of `apparatus`.
    pub fn uniform(apparatus: &Apparatus<T>, angle: T) -> Self {
        MeasurementSetting { analyzers: apparatus.detectors.keys().map(|k| (k.clone(), Some(angle))).collect() }
    }

    pub fn hv(apparatus: &Apparatus<T>) -> Self {
        Self::uniform(apparatus, T::zero())
    }

    pub fn diagonal(apparatus: &Apparatus<T>) -> Self {
        Self::uniform(apparatus, T::lit(45.0))
    }

    /// Analyzer angle in detector order; `None` means no analyzer.
    pub fn angles_for(&self, apparatus: &Apparatus<T>) -> Result<Vec<Option<T>>> {
        for (id, a) in &self.analyzers {
            if !apparatus.detectors.contains_key(id) {
                return Err(Error::Setting(format!("unknown detector {id}")));
            }
            if let Some(a) = a {
                if !(*a >= T::zero() && *a < T::lit(180.0)) {
                    return Err(Error::Setting(format!("{id}: angle {a} outside [0, 180)")));
                }
            }
        }
        Ok(apparatus.detectors.keys().map(|k| self.analyzers.get(k).copied().flatten()).collect())
    }
}

/// One detector's reading in an outcome key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    H,
    V,
    Plus,
    Minus,
    /// No analyzer in front of the detector.
    Any,
}

impl Symbol {
    fn as_char(self) -> char {
        match self {
            Symbol::H => 'H',
            Symbol::V => 'V',
            Symbol::Plus => '+',
            Symbol::Minus => '-',
            Symbol::Any => '*',
        }
    }

    /// `true` for the second basis vector `|θ+90°⟩`.
    pub fn is_orthogonal(self) -> bool {
        matches!(self, Symbol::V | Symbol::Minus)
    }
}

/// Joint detector reading, e.g. `HVVH` or `++-+`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(pub Vec<Symbol>);

impl Outcome {
    /// Number of `+` (or `H`) readings.
    pub fn parallel_count(&self) -> usize {
        self.0.iter().filter(|s| matches!(s, Symbol::Plus | Symbol::H)).count()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for Outcome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                'H' | 'h' => Ok(Symbol::H),
                'V' | 'v' => Ok(Symbol::V),
                '+' => Ok(Symbol::Plus),
                '-' | '−' => Ok(Symbol::Minus),
                '*' => Ok(Symbol::Any),
                _ => Err(Error::UnknownOutcome(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Outcome)
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All outcomes of a setting in canonical order, with the analyzer angle each
/// detector reading corresponds to (`None` for pass-through).
pub(crate) fn enumerate_outcomes<T: Real>(angles: &[Option<T>]) -> Vec<(Outcome, Vec<Option<T>>)> {
    let analyzed: Vec<usize> = (0..angles.len()).filter(|&i| angles[i].is_some()).collect();
    let k = analyzed.len();
    let mut out = Vec::with_capacity(1 << k);
    for bits in 0..(1usize << k) {
        let mut symbols = vec![Symbol::Any; angles.len()];
        let mut proj = vec![None; angles.len()];
        for (j, &i) in analyzed.iter().enumerate() {
            let orth = (bits >> (k - 1 - j)) & 1 == 1;
            let a = angles[i].expect("analyzed");
            symbols[i] = match (a == T::zero(), orth) {
                (true, false) => Symbol::H,
                (true, true) => Symbol::V,
                (false, false) => Symbol::Plus,
                (false, true) => Symbol::Minus,
            };
            proj[i] = Some(if orth { a + T::lit(90.0) } else { a });
        }
        out.push((Outcome(symbols), proj));
    }
    out
}

/// Outcome probabilities of `rho` (photons in detector order) under `angles`.
pub fn outcome_probabilities<T: Real>(rho: &DensityMatrix<T>, angles: &[Option<T>]) -> Result<BTreeMap<Outcome, T>> {
    if angles.len() != rho.photon_count() {
        return Err(Error::PhotonCount { expected: rho.photon_count(), got: angles.len() });
    }
    let mut out = BTreeMap::new();
    for (outcome, proj) in enumerate_outcomes(angles) {
        // Pass-through photons are summed over a complete basis.
        let free: Vec<usize> = (0..proj.len()).filter(|&i| proj[i].is_none()).collect();
        let mut p = T::zero();
        for fill in 0..(1usize << free.len()) {
            let mut a: Vec<T> = proj.iter().map(|x| x.unwrap_or_else(T::zero)).collect();
            for (j, &i) in free.iter().enumerate() {
                if (fill >> j) & 1 == 1 {
                    a[i] = T::lit(90.0);
                }
            }
            p = p + rho.product_probability(&a)?;
        }
        out.insert(outcome, p);
    }
    Ok(out)
}

/// Probabilities of every outcome conditioned on a four-fold coincidence,
/// with ideal beam-splitters and the partial-coherence channel for `delay`.
pub fn exact_outcome_probabilities<T: Real>(
    apparatus: &Apparatus<T>,
    setting: &MeasurementSetting<T>,
    delay: &DelayElement<T>,
    v0: T,
) -> Result<BTreeMap<Outcome, T>> {
    apparatus.validate()?;
    let angles = setting.angles_for(apparatus)?;
    let rho = apparatus.detected_density(delay, v0)?;
    outcome_probabilities(&rho, &angles)
}

/// `E = Σ (−1)^(number of orthogonal readings) p` for analyzers at `angles` (detector order).
pub fn exact_correlation<T: Real>(apparatus: &Apparatus<T>, angles: &[T], delay: &DelayElement<T>, v0: T) -> Result<T> {
    let rho = apparatus.detected_density(delay, v0)?;
    rho.correlation(angles)
}

/// Three-photon state left after a polarizer in `polarizer_mode` transmits a photon.
///
/// Uses the ideal (fully coherent) detected state. Returns the state of the
/// other photons and the probability the polarizer transmits.
pub fn three_photon_ghz<T: Real>(
    apparatus: &Apparatus<T>,
    polarizer_mode: Mode,
    angle: T,
) -> Result<(PureState<T>, T)> {
    let (state, _) = apparatus.detected_state()?;
    let pol = PolarizerElement::new(polarizer_mode, angle, Branch::Pass)?;
    let (projected, p) = apply_polarizer(&state, &pol)?;
    let labels = projected.labels()?;
    let photon = labels
        .iter()
        .find(|l| l.mode == polarizer_mode)
        .map(|l| l.index)
        .ok_or(Error::ModeOccupancy(polarizer_mode))?;
    Ok((projected.remove_photon(photon)?, p))
}
