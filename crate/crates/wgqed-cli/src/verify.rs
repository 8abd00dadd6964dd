//! The acceptance suite. Each criterion is a list of checks; a criterion passes
//! when all of its checks do.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wgqed::oracle::report::{comparison_report, parse_scenarios, ReportRow, Scenario, ScenarioKind, DEFAULT_SCENARIOS};
use wgqed::single_photon::{excitation_amplitudes, excitation_closed_form, linspace, poles, Response};
use wgqed::two_photon::{f_pair, half_width, quench_residual, Statistics};
use wgqed::{C64, TwoAtomSystem};

use crate::commands::{bound_state_table, fluorescence_table, poles_table, spectrum_table};
use crate::config::{Format, RunConfig, VerifyConfig};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

pub const CRITERIA: [u32; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];
const SEED: u64 = 0x5eed_2a70;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// value ≤ bound; the bound is an error tolerance.
    AtMost,
    /// value < bound.
    Below,
    /// value > bound.
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
    /// Set for qualitative checks, overriding the numeric comparison.
    pub outcome: Option<bool>,
}

impl Check {
    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, bound, kind: Bound::AtMost, outcome: None }
    }

    pub fn below(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, bound, kind: Bound::Below, outcome: None }
    }

    pub fn above(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, bound, kind: Bound::Above, outcome: None }
    }

    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        Self { label: label.into(), value: f64::NAN, bound: f64::NAN, kind: Bound::AtMost, outcome: Some(ok) }
    }

    pub fn pass(&self) -> bool {
        if let Some(ok) = self.outcome {
            return ok;
        }
        match self.kind {
            Bound::AtMost => self.value <= self.bound,
            Bound::Below => self.value < self.bound,
            Bound::Above => self.value > self.bound,
        }
    }

    fn describe(&self) -> String {
        if self.outcome.is_some() {
            return self.label.clone();
        }
        let op = match self.kind {
            Bound::AtMost => "<=",
            Bound::Below => "<",
            Bound::Above => ">",
        };
        format!("{}: {:.3e} {op} {:.3e}", self.label, self.value, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::pass)
    }

    /// `PASS 3 pole algebra | ...` with every check spelled out.
    pub fn line(&self) -> String {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let detail: Vec<String> = self.checks.iter().map(Check::describe).collect();
        format!("{verdict} {:>2} {} | {}", self.id, self.name, detail.join("; "))
    }

    fn override_tolerance(mut self, tol: Option<f64>) -> Self {
        if let Some(t) = tol {
            for c in self.checks.iter_mut().filter(|c| c.kind == Bound::AtMost && c.outcome.is_none()) {
                c.bound = t;
            }
        }
        self
    }
}

fn sym(omega_d: f64) -> TwoAtomSystem {
    TwoAtomSystem::detuned(0.0, omega_d, 1.0, 1.0)
}

fn random_system(rng: &mut ChaCha8Rng, equal_tau: bool) -> TwoAtomSystem {
    let wc = rng.gen_range(-3.0..3.0);
    let wd = rng.gen_range(0.05..6.0);
    let t1 = rng.gen_range(0.5..2.0);
    let t2 = if equal_tau { t1 } else { rng.gen_range(0.5..2.0) };
    TwoAtomSystem::detuned(wc, wd, t1, t2)
}

pub fn unitarity(tol: f64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let sys = random_system(&mut rng, false);
        let r = Response::new(&sys).expect("valid system");
        let reach = 20.0 * sys.gamma_bar();
        for k in linspace(sys.omega_c() - reach, sys.omega_c() + reach, 10_000) {
            worst = worst.max((r.transmission(k).norm() - 1.0).abs());
        }
    }
    CriterionResult { id: 1, name: "unitarity", checks: vec![Check::at_most("max ||t|-1| over 5x10^4 points", worst, tol)] }
}

pub fn transmission_zeros(tol: f64) -> CriterionResult {
    let checks = [0.25, 2.0, 6.0]
        .iter()
        .map(|&od| {
            let sys = sym(od);
            let r = Response::new(&sys).expect("valid system");
            let worst = [sys.atom1.omega, sys.atom2.omega].iter().map(|&k| r.waveguide(k).0.norm()).fold(0.0, f64::max);
            Check::at_most(format!("|t_bar| at resonances, omega_d={od}"), worst, tol)
        })
        .collect();
    CriterionResult { id: 2, name: "transmission zeros", checks }
}

pub fn pole_algebra(tol_exact: f64, tol_rel: f64) -> CriterionResult {
    let mut exact_err: f64 = 0.0;
    for wc in [0.0, 0.7, -3.1] {
        let p = poles(&TwoAtomSystem::detuned(wc, 0.0, 1.0, 1.0));
        exact_err = exact_err.max((p.subradiant() - C64::new(wc, 0.0)).norm());
        exact_err = exact_err.max((p.superradiant() - C64::new(wc, -2.0)).norm());
    }
    let od = 0.1;
    let quoted = -od * od;
    let sub = poles(&sym(od)).subradiant().im;
    CriterionResult {
        id: 3,
        name: "pole algebra",
        checks: vec![
            Check::at_most("omega_d=0 roots vs {omega_c, omega_c-2i}", exact_err, tol_exact),
            Check::at_most(format!("omega_d=0.1 subradiant Im {sub:.6e} vs -omega_d^2/gamma"), ((sub - quoted) / quoted).abs(), tol_rel),
        ],
    }
}

pub fn quench(max_equal: f64, min_unequal: f64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let sys = random_system(&mut rng, true);
        let probe = (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
        worst = worst.max(quench_residual(&sys, &[probe]).expect("g = 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let probes: Vec<(f64, f64)> = (0..1000).map(|_| (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0))).collect();
    let unequal = quench_residual(&TwoAtomSystem::detuned(0.0, 2.0, 1.0, 2.0), &probes).expect("g = 0");
    CriterionResult {
        id: 4,
        name: "quench",
        checks: vec![
            Check::at_most("max |B/tau|^2, tau1=tau2, 10^3 probes", worst, max_equal),
            Check::above("max |B/tau|^2, tau2=2 tau1", unequal, min_unequal),
        ],
    }
}

pub fn closed_form_consistency(tol: f64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let sys = random_system(&mut rng, false);
        let k = sys.omega_c() + rng.gen_range(-10.0..10.0);
        let a = excitation_amplitudes(k, &sys).expect("regular point");
        let b = excitation_closed_form(k, &sys).expect("regular point");
        worst = worst.max(a.rel_diff(&b));
    }
    CriterionResult { id: 5, name: "closed-form consistency", checks: vec![Check::at_most("max relative difference", worst, tol)] }
}

pub fn branch_invariance(tol: f64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let sys = random_system(&mut rng, false);
        let e = 2.0 * sys.omega_c() + rng.gen_range(-8.0..8.0);
        let x = rng.gen_range(0.0..10.0);
        let s = sys.derived_scales(e);
        let (a1, a2) = f_pair(x, &s, &sys).expect("non-confluent");
        let (b1, b2) = f_pair(x, &s.flipped(), &sys).expect("non-confluent");
        let scale = a1.norm().max(a2.norm()).max(f64::MIN_POSITIVE);
        worst = worst.max((a1 - b1).norm().max((a2 - b2).norm()) / scale);
    }
    CriterionResult { id: 6, name: "branch invariance", checks: vec![Check::at_most("max relative change under D_b -> -D_b", worst, tol)] }
}

fn preset_curve(preset: &str, curve: usize) -> CliResult<Table> {
    let mut c = RunConfig::preset(preset)?;
    c.bound_state.curves = vec![c.bound_state.curves[curve].clone()];
    bound_state_table(&c)
}

pub fn beats(tol: f64) -> CriterionResult {
    let expected = TAU / 140f64.sqrt();
    let check = match preset_curve("fig2b", 1) {
        Ok(t) => match t.get_meta("curve0.beat_period").and_then(|v| v.parse::<f64>().ok()) {
            Some(p) => Check::at_most(format!("fig2b beat period {p:.6} vs 2pi/sqrt(140)"), (p / expected - 1.0).abs(), tol),
            None => Check::holds("fig2b: fewer than three maxima", false),
        },
        Err(e) => Check::holds(format!("fig2b: {e}"), false),
    };
    CriterionResult { id: 7, name: "beats", checks: vec![check] }
}

pub fn statistics() -> CriterionResult {
    let classify = |curve: usize, want: Statistics| match preset_curve("fig2a", curve) {
        Ok(t) => {
            let got = t.get_meta("curve0.statistics").unwrap_or("missing").to_string();
            Check::holds(format!("fig2a curve {curve}: {got}, want {}", want.as_str()), got == want.as_str())
        }
        Err(e) => Check::holds(format!("fig2a curve {curve}: {e}"), false),
    };
    CriterionResult {
        id: 8,
        name: "statistics",
        checks: vec![classify(0, Statistics::Bunched), classify(2, Statistics::Antibunched)],
    }
}

fn cut_half_width(preset: &str) -> Option<f64> {
    let sys = RunConfig::preset(preset).ok()?.system.build().ok()?;
    let grid = linspace(-10.0, 10.0, 4001);
    let r = Response::new(&sys).ok()?;
    let e = 3.0 + 2.0 * sys.omega_c();
    let v: Vec<f64> = grid.iter().map(|&d| r.normalized_fluorescence(e, 0.0, d)).collect();
    half_width(&grid, &v)
}

pub fn linewidth(rel_tol: f64) -> CriterionResult {
    let narrow = cut_half_width("fig1b").unwrap_or(f64::INFINITY);
    let broad = cut_half_width("fig1c").unwrap_or(f64::INFINITY);
    CriterionResult {
        id: 9,
        name: "linewidth ordering",
        checks: vec![
            Check::below("fig1b half-width", narrow, 1.0),
            Check::at_most(format!("fig1c half-width {broad:.4} vs 2"), (broad / 2.0 - 1.0).abs(), rel_tol),
        ],
    }
}

fn rows_of(scenarios: &[Scenario], kinds: &[ScenarioKind]) -> Vec<ReportRow> {
    let picked: Vec<Scenario> = scenarios.iter().filter(|s| kinds.contains(&s.kind)).cloned().collect();
    comparison_report(&picked)
}

pub fn oracle_single(scenarios: &[Scenario], tol: f64) -> CriterionResult {
    let rows = rows_of(scenarios, &[ScenarioKind::Transmission]);
    let mut checks: Vec<Check> = rows
        .iter()
        .map(|r| {
            if r.quantity == "error" {
                Check::holds(format!("{}: {}", r.scenario_id, r.oracle), false)
            } else {
                Check::at_most(format!("{} |t_hat-t|/|t|", r.scenario_id), r.rel_err, tol)
            }
        })
        .collect();
    if checks.len() < 5 {
        checks.push(Check::holds(format!("{} transmission scenarios, need 5", rows.len()), false));
    }
    CriterionResult { id: 10, name: "oracle, single photon", checks }
}

pub fn oracle_two(scenarios: &[Scenario], tol: f64) -> CriterionResult {
    let rows = rows_of(scenarios, &[ScenarioKind::P2Shape, ScenarioKind::QuenchSweep]);
    let mut checks = Vec::new();
    for r in &rows {
        if r.quantity == "error" {
            checks.push(Check::holds(format!("{}: {}", r.scenario_id, r.oracle), false));
        } else if r.quantity == "p2_shape_l2" {
            checks.push(Check::at_most(format!("{} L2 shape error", r.scenario_id), r.rel_err, tol));
        } else {
            checks.push(Check::below(format!("{} {}", r.scenario_id, r.quantity), r.rel_err, 1.0));
        }
    }
    if !rows.iter().any(|r| r.quantity == "p2_shape_l2") || !rows.iter().any(|r| r.quantity.starts_with("offsupport")) {
        checks.push(Check::holds("need a p2_shape and a quench_sweep scenario", false));
    }
    CriterionResult { id: 11, name: "oracle, two photon", checks }
}

/// Every table command twice in both formats; the count of differing outputs.
pub fn determinism() -> CriterionResult {
    let builders: [(&str, fn(&RunConfig) -> CliResult<Table>, &str); 4] = [
        ("spectrum", spectrum_table, "fig2a"),
        ("fluorescence-map", fluorescence_table, "fig1a"),
        ("bound-state", bound_state_table, "fig2b"),
        ("poles", poles_table, "fig1b"),
    ];
    let mut checks = Vec::new();
    for (name, build, preset) in builders {
        for format in [Format::Csv, Format::Json] {
            let run = || -> CliResult<Vec<u8>> {
                let mut c = RunConfig::preset(preset)?;
                c.output.format = format;
                let mut buf = Vec::new();
                build(&c)?.write(format, &mut buf)?;
                Ok(buf)
            };
            let ok = matches!((run(), run()), (Ok(a), Ok(b)) if a == b);
            checks.push(Check::holds(format!("{name} {format:?} byte-identical"), ok));
        }
    }
    CriterionResult { id: 12, name: "determinism", checks }
}

/// Spec tolerances.
pub mod tol {
    pub const UNITARITY: f64 = 1e-12;
    pub const ZEROS: f64 = 1e-12;
    pub const POLES_EXACT: f64 = 0.0;
    pub const SUBRADIANT_REL: f64 = 0.05;
    pub const QUENCH_MAX: f64 = 1e-20;
    pub const UNEQUAL_MIN: f64 = 1e-6;
    pub const CONSISTENCY: f64 = 1e-12;
    pub const BRANCH: f64 = 1e-12;
    pub const BEAT_REL: f64 = 0.03;
    pub const LINEWIDTH_REL: f64 = 0.15;
    pub const ORACLE_SINGLE: f64 = 0.02;
    pub const ORACLE_TWO: f64 = 0.10;
}

pub fn load_scenarios(cfg: &VerifyConfig) -> CliResult<Vec<Scenario>> {
    let text = match &cfg.scenarios {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => DEFAULT_SCENARIOS.to_string(),
    };
    Ok(parse_scenarios(&text)?)
}

pub fn run_criterion(id: u32, scenarios: &[Scenario]) -> CriterionResult {
    match id {
        1 => unitarity(tol::UNITARITY),
        2 => transmission_zeros(tol::ZEROS),
        3 => pole_algebra(tol::POLES_EXACT, tol::SUBRADIANT_REL),
        4 => quench(tol::QUENCH_MAX, tol::UNEQUAL_MIN),
        5 => closed_form_consistency(tol::CONSISTENCY),
        6 => branch_invariance(tol::BRANCH),
        7 => beats(tol::BEAT_REL),
        8 => statistics(),
        9 => linewidth(tol::LINEWIDTH_REL),
        10 => oracle_single(scenarios, tol::ORACLE_SINGLE),
        11 => oracle_two(scenarios, tol::ORACLE_TWO),
        _ => determinism(),
    }
}

pub fn run_suite(cfg: &VerifyConfig) -> CliResult<Vec<CriterionResult>> {
    let ids = cfg.criteria.clone().unwrap_or_else(|| CRITERIA.to_vec());
    if let Some(bad) = ids.iter().find(|i| !CRITERIA.contains(i)) {
        return Err(CliError::Validation(format!("verify.criteria: no criterion {bad}")));
    }
    let scenarios = if ids.iter().any(|&i| i == 10 || i == 11) { load_scenarios(cfg)? } else { Vec::new() };
    Ok(ids.iter().map(|&i| run_criterion(i, &scenarios).override_tolerance(cfg.tolerance)).collect())
}

pub fn report_table(results: &[CriterionResult]) -> Table {
    let mut t = Table::new(&[("criterion", ""), ("name", ""), ("check", ""), ("value", ""), ("bound", ""), ("pass", "")]);
    for r in results {
        for c in &r.checks {
            t.push(vec![
                Cell::Num(r.id as f64),
                r.name.into(),
                c.label.as_str().into(),
                c.value.into(),
                c.bound.into(),
                if c.pass() { "PASS" } else { "FAIL" }.into(),
            ]);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_zero_fails_error_checks() {
        let cfg = VerifyConfig { criteria: Some(vec![1, 5]), tolerance: Some(0.0), ..Default::default() };
        let res = run_suite(&cfg).unwrap();
        assert!(res.iter().all(|r| !r.pass()));
        let cfg = VerifyConfig { criteria: Some(vec![1, 5]), ..Default::default() };
        assert!(run_suite(&cfg).unwrap().iter().all(CriterionResult::pass));
    }

    #[test]
    fn unknown_criterion_rejected() {
        let cfg = VerifyConfig { criteria: Some(vec![13]), ..Default::default() };
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn missing_scenario_file_is_io_error() {
        let cfg = VerifyConfig {
            scenarios: Some("/nonexistent/scenarios.toml".into()),
            criteria: Some(vec![10]),
            ..Default::default()
        };
        assert_eq!(run_suite(&cfg).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn empty_check_list_fails() {
        assert!(!CriterionResult { id: 1, name: "x", checks: vec![] }.pass());
        assert!(!oracle_single(&[], 0.02).pass());
    }

    #[test]
    fn line_format() {
        let r = CriterionResult { id: 2, name: "demo", checks: vec![Check::at_most("err", 1e-13, 1e-12)] };
        assert_eq!(r.line(), "PASS  2 demo | err: 1.000e-13 <= 1.000e-12");
    }
}
