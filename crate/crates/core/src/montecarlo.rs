//! Seeded Poisson simulation of windowed four-fold coincidence counts.
//!
//! Expected counts per outcome combine the exact conditional probabilities
//! with a calibrated signal rate, a flat background floor, and accidental
//! coincidences from detector dark counts. Every table is reproducible from
//! its seed: each scan point draws from its own ChaCha8 stream.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::mix;
use crate::error::{Error, Result};
use crate::experiment::{outcome_probabilities, postselect_fourfold, Apparatus, MeasurementSetting, Outcome};
use crate::scalar::Real;

/// Background four-fold counts per non-desired combination: 0.5 per 6000 s.
pub const DEFAULT_BACKGROUND_RATE: f64 = 0.5 / 6000.0;
/// Desired-to-background ratio per outcome combination.
pub const DEFAULT_SIGNAL_TO_NOISE: f64 = 200.0;
/// Four-fold rate of the two desired combinations together, giving each
/// desired combination 200× the background floor.
pub const DEFAULT_DESIRED_RATE: f64 = 2.0 * DEFAULT_SIGNAL_TO_NOISE * DEFAULT_BACKGROUND_RATE;
/// Half a year in seconds.
pub const SIX_MONTHS_S: f64 = 1.58e7;

/// Count-rate parameters of the coincidence electronics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateModel {
    /// Post-selected four-fold signal rate (all outcomes together, before
    /// detector losses), events/s.
    pub fourfold_rate_desired: f64,
    /// Flat floor per outcome combination, events/s.
    pub background_fourfold_rate: f64,
    /// Per-photon detection probability.
    pub detector_efficiency: f64,
    /// Dark counts per detector, counts/s.
    pub dark_count_rate: f64,
    /// Coincidence window, s.
    pub coincidence_window: f64,
}

impl Default for RateModel {
    fn default() -> Self {
        RateModel {
            fourfold_rate_desired: DEFAULT_DESIRED_RATE,
            background_fourfold_rate: DEFAULT_BACKGROUND_RATE,
            detector_efficiency: 1.0,
            dark_count_rate: 0.0,
            coincidence_window: 3e-9,
        }
    }
}

impl RateModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::RateModel(m.to_string()));
        let rates = [self.fourfold_rate_desired, self.background_fourfold_rate, self.dark_count_rate];
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return bad("rates must be finite and non-negative");
        }
        if !(self.detector_efficiency > 0.0 && self.detector_efficiency <= 1.0) {
            return bad("detector_efficiency must lie in (0, 1]");
        }
        if !(self.coincidence_window.is_finite() && self.coincidence_window > 0.0) {
            return bad("coincidence_window must be positive");
        }
        Ok(())
    }

    /// Signal rate after losses at `detectors` detectors.
    pub fn effective_signal_rate(&self, detectors: usize) -> f64 {
        self.fourfold_rate_desired * self.detector_efficiency.powi(detectors as i32)
    }

    /// N-fold accidental rate from dark counts alone: `N τ^(N−1) r^N`.
    pub fn dark_accidental_rate(&self, detectors: usize) -> f64 {
        let n = detectors as i32;
        if n == 0 {
            return 0.0;
        }
        n as f64 * self.coincidence_window.powi(n - 1) * self.dark_count_rate.powi(n)
    }
}

/// Four-fold counts per outcome for one integration period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub counts: BTreeMap<Outcome, u64>,
    /// Seconds.
    pub integration_time: f64,
    pub seed: u64,
}

impl CountTable {
    pub fn get(&self, outcome: &Outcome) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Sum of counts over `keys`; unknown keys are an error.
    pub fn sum_of(&self, keys: &[Outcome]) -> Result<u64> {
        keys.iter().map(|k| self.counts.get(k).copied().ok_or_else(|| Error::UnknownOutcome(k.to_string()))).sum()
    }
}

/// Expected four-fold rate (events/s) of every outcome.
///
/// Wrong-port PBS routings are added incoherently to the ideal history;
/// only the ideal history carries the partial-coherence channel.
pub fn expected_rates<T: Real>(
    apparatus: &Apparatus<T>,
    setting: &MeasurementSetting<T>,
    rates: &RateModel,
) -> Result<BTreeMap<Outcome, f64>> {
    apparatus.validate()?;
    rates.validate()?;
    let angles = setting.angles_for(apparatus)?;
    let modes = apparatus.detector_modes();
    let delay = apparatus.delay();
    let v0 = apparatus.visibility_ceiling;

    let branches = apparatus.propagate_with_errors()?;
    let mut weighted: BTreeMap<Outcome, f64> = BTreeMap::new();
    let mut ideal_weight = None;
    for (idx, (w, state)) in branches.iter().enumerate() {
        let (post, p) = match postselect_fourfold(state, &modes) {
            Ok(x) => x,
            Err(Error::ImpossibleOutcome(_)) => continue,
            Err(e) => return Err(e),
        };
        let weight = (*w * p).to_f64_lossy();
        let rho = if idx == 0 {
            ideal_weight = Some(weight);
            let hv = post.to_hv()?;
            if hv.len() == 2 {
                crate::optics::dephase_by_distinguishability(&hv, delay.overlap(), v0)?
            } else {
                mix(&[(T::one(), hv)])?
            }
        } else {
            mix(&[(T::one(), post)])?
        };
        for (o, q) in outcome_probabilities(&rho, &angles)? {
            *weighted.entry(o).or_default() += weight * q.to_f64_lossy();
        }
    }
    let ideal = ideal_weight.ok_or(Error::ImpossibleOutcome("error-free history never gives a coincidence"))?;
    let n = modes.len();
    let signal = rates.effective_signal_rate(n);
    let floor = rates.background_fourfold_rate + rates.dark_accidental_rate(n) / weighted.len().max(1) as f64;
    Ok(weighted.into_iter().map(|(o, q)| (o, signal * q / ideal + floor)).collect())
}

/// Poisson draw for every outcome from a dedicated generator stream.
fn sample(expected: &BTreeMap<Outcome, f64>, time: f64, seed: u64, stream: u64) -> Result<CountTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut counts = BTreeMap::new();
    for (o, rate) in expected {
        let mean = rate * time;
        let n = if mean > 0.0 {
            let d = Poisson::new(mean).map_err(|e| Error::RateModel(e.to_string()))?;
            d.sample(&mut rng) as u64
        } else {
            0
        };
        counts.insert(o.clone(), n);
    }
    Ok(CountTable { counts, integration_time: time, seed })
}

/// Simulated four-fold count table for `integration_time` seconds.
pub fn monte_carlo_counts<T: Real>(
    apparatus: &Apparatus<T>,
    setting: &MeasurementSetting<T>,
    rates: &RateModel,
    integration_time: f64,
    seed: u64,
) -> Result<CountTable> {
    if !(integration_time.is_finite() && integration_time >= 0.0) {
        return Err(Error::RateModel(format!("integration time {integration_time} s")));
    }
    let expected = expected_rates(apparatus, setting, rates)?;
    sample(&expected, integration_time, seed, 0)
}

/// One table per delay; point `i` uses generator stream `i`.
pub fn delay_scan<T: Real>(
    apparatus: &Apparatus<T>,
    setting: &MeasurementSetting<T>,
    delays_fs: &[T],
    rates: &RateModel,
    time_per_point: f64,
    seed: u64,
) -> Result<Vec<(T, CountTable)>> {
    if !(time_per_point.is_finite() && time_per_point >= 0.0) {
        return Err(Error::RateModel(format!("integration time {time_per_point} s")));
    }
    delays_fs
        .par_iter()
        .enumerate()
        .map(|(i, &d)| {
            let expected = expected_rates(&apparatus.with_delay(d), setting, rates)?;
            Ok((d, sample(&expected, time_per_point, seed, i as u64)?))
        })
        .collect()
}

/// Seconds needed to collect `target_events` four-fold events at the
/// detected signal rate of a four-detector setup.
pub fn feasibility_estimate(target_events: u64, rates: &RateModel) -> Result<f64> {
    rates.validate()?;
    if target_events == 0 {
        return Ok(0.0);
    }
    let rate = rates.effective_signal_rate(4);
    if rate <= 0.0 {
        return Err(Error::InfiniteDuration);
    }
    Ok(target_events as f64 / rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_rates_match_calibration() {
        let r = RateModel::default();
        r.validate().unwrap();
        assert!((r.background_fourfold_rate * 6000.0 - 0.5).abs() < 1e-12);
        assert!((r.fourfold_rate_desired * 6000.0 - 200.0).abs() < 1e-9);
    }

    #[test]
    fn rate_model_rejects_bad_values() {
        for r in [
            RateModel { detector_efficiency: 0.0, ..RateModel::default() },
            RateModel { background_fourfold_rate: -1.0, ..RateModel::default() },
            RateModel { coincidence_window: 0.0, ..RateModel::default() },
        ] {
            assert!(r.validate().is_err());
        }
    }

    #[test]
    fn zero_time_gives_empty_table() {
        let a = Apparatus::<f64>::four_photon_ghz();
        let t = monte_carlo_counts(&a, &MeasurementSetting::hv(&a), &RateModel::default(), 0.0, 9).unwrap();
        assert_eq!(t.counts.len(), 16);
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn same_seed_same_table() {
        let a = Apparatus::<f64>::four_photon_ghz();
        let s = MeasurementSetting::diagonal(&a);
        let r = RateModel::default();
        assert_eq!(
            monte_carlo_counts(&a, &s, &r, 60_000.0, 5).unwrap(),
            monte_carlo_counts(&a, &s, &r, 60_000.0, 5).unwrap()
        );
        assert_ne!(
            monte_carlo_counts(&a, &s, &r, 60_000.0, 5).unwrap(),
            monte_carlo_counts(&a, &s, &r, 60_000.0, 6).unwrap()
        );
    }

    #[test]
    fn feasibility_basics() {
        let r = RateModel::default();
        assert_eq!(feasibility_estimate(0, &r).unwrap(), 0.0);
        let t1 = feasibility_estimate(1000, &r).unwrap();
        let mut r2 = r.clone();
        r2.fourfold_rate_desired *= 2.0;
        assert!((feasibility_estimate(1000, &r2).unwrap() - t1 / 2.0).abs() < 1e-9);
        let mut r0 = r;
        r0.fourfold_rate_desired = 0.0;
        assert_eq!(feasibility_estimate(1, &r0), Err(Error::InfiniteDuration));
    }

    #[test]
    fn dark_accidentals() {
        let r = RateModel { dark_count_rate: 1000.0, coincidence_window: 1e-9, ..RateModel::default() };
        // 4 · (1e-9)³ · 1000⁴
        assert!((r.dark_accidental_rate(4) - 4e-15).abs() < 1e-27);
    }

    #[test]
    fn pbs_errors_leak_into_hv_table() {
        let mut a = Apparatus::<f64>::four_photon_ghz();
        for e in &mut a.elements {
            if let crate::experiment::Element::Pbs(p) = e {
                p.error_rate = 1e-3;
            }
        }
        let r = RateModel { background_fourfold_rate: 0.0, ..RateModel::default() };
        let rates = expected_rates(&a, &MeasurementSetting::hv(&a), &r).unwrap();
        let leak: f64 =
            rates.iter().filter(|(o, _)| !["HVVH", "VHHV"].contains(&o.to_string().as_str())).map(|(_, v)| v).sum();
        assert!(leak > 0.0);
        // exactly one wrong port, weight 2ε(1−ε), rescues the bunched half;
        // relative to the error-free weight (1−ε)² that is 2ε/(1−ε)
        let want = r.fourfold_rate_desired * 2.0 * 1e-3 / (1.0 - 1e-3);
        assert!((leak - want).abs() < 1e-12 * r.fourfold_rate_desired, "{leak} vs {want}");
    }
}
