mod common;

use ghz_core::{
    chsh_value, fidelity, mix, project_bell, swap::CHSH_LHV_BOUND, via_45_coincidence, BellKind, ChshAngles,
    Coincidence, DensityMatrix, Error, Mode, SwapReport,
};

const MIDDLE: (Mode, Mode) = (Mode { port: 2, primed: true }, Mode { port: 3, primed: true });

fn noisy() -> DensityMatrix {
    mix(&[(0.89, common::ghz_target()), (0.11, common::ghz_partner())]).unwrap()
}

#[test]
fn mixture_purity_and_fidelities() {
    let rho = noisy();
    assert!((rho.purity() - 0.8042).abs() < 1e-12);
    assert!((fidelity(&rho, &common::ghz_target()).unwrap() - 0.89).abs() < 1e-12);
    assert!((fidelity(&rho, &common::ghz_partner()).unwrap() - 0.11).abs() < 1e-12);
}

#[test]
fn pure_ghz_swaps_perfectly() {
    let rho = DensityMatrix::from_pure(&common::ghz_target()).unwrap();
    let r = project_bell(&rho, MIDDLE, BellKind::PhiPlus).unwrap();
    assert!((r.projection_probability - 0.5).abs() < 1e-12);
    assert!((r.fidelity_to_target - 1.0).abs() < 1e-12);
    let modes: Vec<Mode> = r.conditioned.modes();
    assert_eq!(modes, vec![Mode::new(1), Mode::new(4)]);
    for k in [BellKind::PsiPlus, BellKind::PsiMinus] {
        assert!(matches!(project_bell(&rho, MIDDLE, k), Err(Error::ImpossibleOutcome(_))));
    }
}

#[test]
fn cross_coincidences_select_phi_minus() {
    let rho = noisy();
    let cross = via_45_coincidence(&rho, MIDDLE, Coincidence::Cross).unwrap();
    let abs = project_bell(&rho, MIDDLE, BellKind::PhiMinus).unwrap();
    assert_eq!(cross.target, BellKind::PhiMinus);
    assert!(cross.conditioned.max_abs_diff(&abs.conditioned).unwrap() < 1e-12);
    assert!((cross.fidelity_to_target - 0.89).abs() < 1e-12);
}

#[test]
fn chsh_of_swapped_pair() {
    let r = project_bell(&noisy(), MIDDLE, BellKind::PhiPlus).unwrap();
    let s = r.chsh().unwrap();
    // w φ⁺ + (1 − w) φ⁻ at the φ⁺ angles: only the φ⁺ part contributes
    assert!((s - 2.0 * 2f64.sqrt() * 0.89).abs() < 1e-12, "{s}");
    assert!(s > CHSH_LHV_BOUND);

    // dense two-photon check
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = |sign: f64| vec![common::cx(h), common::cx(0.0), common::cx(0.0), common::cx(sign * h)];
    let (p, m) = (common::outer(&phi(1.0)), common::outer(&phi(-1.0)));
    let dense = common::rho_mix(&[(0.89, &p), (0.11, &m)]);
    let ang = ChshAngles::<f64>::phi_plus();
    let e = |x: f64, y: f64| common::correlation(&dense, &[x, y]);
    let oracle = e(ang.a, ang.b) - e(ang.a, ang.b_prime) + e(ang.a_prime, ang.b) + e(ang.a_prime, ang.b_prime);
    assert!((chsh_value(&r.conditioned, ang).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn report_serializes() {
    let r = project_bell(&noisy(), MIDDLE, BellKind::PhiPlus).unwrap();
    let rep = SwapReport::from_result("phi+ (2',3')", &r).unwrap();
    let json = serde_json::to_value(&rep).unwrap();
    assert!((json["fidelity"].as_f64().unwrap() - 0.89).abs() < 1e-12);
    assert!((json["probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}
