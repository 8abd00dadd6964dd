use wgqed::oracle::model::build_discrete_model;
use wgqed::oracle::report::{comparison_report, parse_scenarios, ScenarioKind, DEFAULT_SCENARIOS};
use wgqed::oracle::scatter::single_excitation_scatter;
use wgqed::single_photon::Response;
use wgqed::TwoAtomSystem;

#[test]
fn default_transmission_scenarios_agree() {
    let scenarios: Vec<_> = parse_scenarios(DEFAULT_SCENARIOS)
        .unwrap()
        .into_iter()
        .filter(|s| s.kind == ScenarioKind::Transmission)
        .collect();
    assert_eq!(scenarios.len(), 5);
    let rows = comparison_report(&scenarios);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn centre_probe_for_close_detuning() {
    // The probe sits on the subradiant pole (width ≈ 0.13), so the packet needs a
    // long period to leave the atoms fully de-excited.
    let sys = TwoAtomSystem::detuned(0.0, 0.5, 1.0, 1.0);
    let model = build_discrete_model(&sys, 1024, (-12.5, 12.5)).unwrap();
    let out = single_excitation_scatter(&model, 0.0, 0.05).unwrap();
    let t = Response::new(&sys).unwrap().transmission(out.k_probe);
    assert!((out.t_hat - t).norm() / t.norm() < 0.02);
    assert!(out.evolution.norm_drift < 1e-8);
    assert!(out.evolution.energy_drift < 1e-8);
}

#[test]
fn halving_dk_and_sigma_moves_estimate_little() {
    let sys = TwoAtomSystem::detuned(0.0, 2.0, 1.0, 1.0);
    let coarse = build_discrete_model(&sys, 512, (-11.5, 13.5)).unwrap();
    let fine = build_discrete_model(&sys, 1024, (-11.5, 13.5)).unwrap();
    let a = single_excitation_scatter(&coarse, 1.0, 0.05).unwrap();
    let b = single_excitation_scatter(&fine, 1.0, 0.025).unwrap();
    // The two grids share no energy, so compare t̂ relative to t at each probe.
    let resp = Response::new(&sys).unwrap();
    let rel = |s: &wgqed::oracle::scatter::SingleScatter| s.t_hat / resp.transmission(s.k_probe);
    let change = (rel(&a) - rel(&b)).norm();
    assert!(change < 5e-3, "{change}");
}
