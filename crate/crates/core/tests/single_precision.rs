use ghz_core::{
    exact_outcome_probabilities, mix, phi_plus_via_45_coincidence, Apparatus32, DelayElement32, MeasurementSetting32,
    Outcome,
};

#[test]
fn ghz_projection_in_f32() {
    let a = Apparatus32::four_photon_ghz();
    let (s, p) = a.detected_state().unwrap();
    assert!((p - 0.5).abs() < 1e-5);
    assert_eq!(s.len(), 2);
    let hv = exact_outcome_probabilities(&a, &MeasurementSetting32::hv(&a), &DelayElement32::at(0.0), 1.0).unwrap();
    let o: Outcome = "HVVH".parse().unwrap();
    assert!((hv[&o] - 0.5).abs() < 1e-5);
}

#[test]
fn visibility_in_f32() {
    let a = Apparatus32::four_photon_ghz();
    let p =
        exact_outcome_probabilities(&a, &MeasurementSetting32::diagonal(&a), &DelayElement32::at(0.0), 0.79).unwrap();
    let (e, o) = (p[&"++++".parse().unwrap()], p[&"+++-".parse().unwrap()]);
    assert!(((e - o) / (e + o) - 0.79).abs() < 1e-5);
    let total: f32 = p.values().sum();
    assert!((total - 1.0).abs() < 1e-5);
}

#[test]
fn swap_in_f32() {
    let a = Apparatus32::four_photon_ghz();
    let (ghz, _) = a.detected_state().unwrap();
    let (_, partner) = ghz_core::optics::phase_flip_partner(&ghz).unwrap();
    let rho = mix(&[(0.89f32, ghz), (0.11, partner)]).unwrap();
    let r = phi_plus_via_45_coincidence(&rho).unwrap();
    assert!((r.fidelity_to_target - 0.89).abs() < 1e-5);
    assert!((r.visibility_45 - 0.78).abs() < 1e-5);
}
