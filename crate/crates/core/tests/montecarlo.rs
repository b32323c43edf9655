use ghz_core::{
    delay_scan, exact_outcome_probabilities, monte_carlo_counts, Apparatus, DelayElement, MeasurementSetting, RateModel,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn chi_square_over_seeds() {
    let a = Apparatus::four_photon_ghz();
    let diag = MeasurementSetting::diagonal(&a);
    let p = exact_outcome_probabilities(&a, &diag, &DelayElement::at(0.0), a.visibility_ceiling).unwrap();
    let events = 1e6;
    let rates = RateModel { fourfold_rate_desired: events, background_fourfold_rate: 0.0, ..RateModel::default() };
    // 16 independent Poisson bins, nothing fixed
    let critical = ChiSquared::new(16.0).unwrap().inverse_cdf(0.999);
    let mut passed = 0;
    for seed in 0..100 {
        let t = monte_carlo_counts(&a, &diag, &rates, 1.0, seed).unwrap();
        let chi2: f64 = p
            .iter()
            .map(|(o, q)| {
                let e = events * q;
                let n = t.get(o) as f64;
                (n - e).powi(2) / e
            })
            .sum();
        if chi2 <= critical {
            passed += 1;
        }
    }
    assert!(passed >= 99, "{passed}/100 seeds pass");
}

#[test]
fn tables_are_reproducible() {
    let a = Apparatus::four_photon_ghz();
    let rates = RateModel::default();
    for setting in [MeasurementSetting::hv(&a), MeasurementSetting::diagonal(&a)] {
        for seed in [0, 1, 2001, u64::MAX] {
            let x = monte_carlo_counts(&a, &setting, &rates, 6000.0, seed).unwrap();
            let y = monte_carlo_counts(&a, &setting, &rates, 6000.0, seed).unwrap();
            assert_eq!(x, y);
        }
    }
}

#[test]
fn scan_points_are_independent_of_scheduling() {
    let a = Apparatus::four_photon_ghz();
    let diag = MeasurementSetting::diagonal(&a);
    let rates = RateModel::default();
    let delays: Vec<f64> = (-5..=5).map(|i| i as f64 * 300.0).collect();
    let full = delay_scan(&a, &diag, &delays, &rates, 24_000.0, 11).unwrap();
    assert_eq!(full, delay_scan(&a, &diag, &delays, &rates, 24_000.0, 11).unwrap());
    for (i, (d, table)) in full.iter().enumerate() {
        assert_eq!(*d, delays[i]);
        assert_eq!(table.seed, 11);
    }
    // the first point draws from stream 0, same as a single run at that delay
    let single = monte_carlo_counts(&a.with_delay(delays[0]), &diag, &rates, 24_000.0, 11).unwrap();
    assert_eq!(full[0].1, single);
}

#[test]
fn scan_interference_peaks_at_zero_delay() {
    let a = Apparatus::four_photon_ghz();
    let diag = MeasurementSetting::diagonal(&a);
    let rates = RateModel { fourfold_rate_desired: 10.0, background_fourfold_rate: 0.0, ..RateModel::default() };
    let delays = [-1500.0, -600.0, 0.0, 600.0, 1500.0];
    let scan = delay_scan(&a, &diag, &delays, &rates, 1e4, 3).unwrap();
    let vis: Vec<f64> = scan
        .iter()
        .map(|(_, t)| {
            ghz_core::visibility_from_counts(t, &["++++".parse().unwrap()], &["+++-".parse().unwrap()]).unwrap().0
        })
        .collect();
    assert!(vis[2] > vis[1] && vis[2] > vis[3]);
    assert!(vis[1] > vis[0] && vis[3] > vis[4]);
}
