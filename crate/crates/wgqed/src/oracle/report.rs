//! Oracle-versus-closed-form comparisons driven by a scenario file.
//!
//! Scenario files are TOML with one `[[scenario]]` table per check:
//!
//! ```toml
//! [[scenario]]
//! id = "t-omega1"
//! kind = "transmission"   # transmission | p2_shape | quench_sweep
//! omega_c = 0.0           # system, in the unit of the rates
//! omega_d = 2.0
//! tau1 = 1.0
//! tau2 = 1.0
//! k1 = 2.0                # probe energy (transmission) or first photon
//! k2 = 0.0                # second photon (p2_shape, quench_sweep)
//! sigma = 0.05            # packet width; quench_sweep takes `sigmas`
//! n_modes = 512           # quench_sweep sizes the grid from sigma when omitted
//! half_width = 12.5       # band half-width R; the band is centred on `centre`
//! tol = 0.02
//! ```
//!
//! Optional keys: `gamma_ng`, `g`, `centre` (defaults to k1 for transmission and
//! (k1 + k2)/2 otherwise), `x_window` (p2_shape comparison range, default 6),
//! `sigmas`, and `mutate_omega2`, which shifts Ω₂ in the closed form only.

use std::io::Write;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::oracle::model::{build_discrete_model, MIN_MODES};
use crate::oracle::scatter::{single_excitation_scatter, two_excitation_scatter, TwoScatter};
use crate::single_photon::Response;
use crate::two_photon::BoundState;
use crate::{AtomParams, TwoAtomSystem, C64};

pub const DEFAULT_SCENARIOS: &str = include_str!("../../scenarios/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Transmission,
    P2Shape,
    QuenchSweep,
}

fn one() -> f64 {
    1.0
}

fn six() -> f64 {
    6.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub omega_c: f64,
    pub omega_d: f64,
    #[serde(default = "one")]
    pub tau1: f64,
    #[serde(default = "one")]
    pub tau2: f64,
    #[serde(default)]
    pub gamma_ng: f64,
    #[serde(default)]
    pub g: f64,
    pub k1: f64,
    #[serde(default)]
    pub k2: f64,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub sigmas: Vec<f64>,
    #[serde(default)]
    pub n_modes: Option<usize>,
    pub half_width: f64,
    #[serde(default)]
    pub centre: Option<f64>,
    #[serde(default = "six")]
    pub x_window: f64,
    pub tol: f64,
    #[serde(default)]
    pub mutate_omega2: f64,
}

#[derive(Debug, Deserialize)]
struct ScenarioFile {
    #[serde(default)]
    scenario: Vec<Scenario>,
}

pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
    Ok(file.scenario)
}

impl Scenario {
    pub fn system(&self) -> TwoAtomSystem {
        let w1 = self.omega_c + self.omega_d;
        let w2 = self.omega_c - self.omega_d;
        TwoAtomSystem::new(
            AtomParams::new(w1, self.tau1).with_loss(self.gamma_ng),
            AtomParams::new(w2, self.tau2).with_loss(self.gamma_ng),
        )
        .with_g(self.g)
    }

    fn closed_system(&self) -> TwoAtomSystem {
        let mut s = self.system();
        s.atom2.omega += self.mutate_omega2;
        s
    }

    fn centre(&self) -> f64 {
        self.centre.unwrap_or(match self.kind {
            ScenarioKind::Transmission => self.k1,
            _ => 0.5 * (self.k1 + self.k2),
        })
    }

    fn window(&self) -> (f64, f64) {
        (self.centre() - self.half_width, self.centre() + self.half_width)
    }

    fn sigma(&self) -> Result<f64> {
        self.sigma.ok_or_else(|| Error::Scenario(format!("{}: sigma missing", self.id)))
    }

    fn n_modes(&self) -> Result<usize> {
        self.n_modes.ok_or_else(|| Error::Scenario(format!("{}: n_modes missing", self.id)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario_id: String,
    pub quantity: String,
    pub closed_form: String,
    pub oracle: String,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ReportRow {
    fn new(sc: &Scenario, quantity: &str, closed_form: String, oracle: String, rel_err: f64, tol: f64) -> Self {
        Self {
            scenario_id: sc.id.clone(),
            quantity: quantity.into(),
            closed_form,
            oracle,
            rel_err,
            tol,
            pass: rel_err <= tol,
        }
    }

    fn failed(sc: &Scenario, err: &Error) -> Self {
        Self {
            scenario_id: sc.id.clone(),
            quantity: "error".into(),
            closed_form: String::new(),
            oracle: err.to_string(),
            rel_err: f64::INFINITY,
            tol: sc.tol,
            pass: false,
        }
    }
}

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_complex(z: C64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

/// L²-normalized shapes of the oracle and closed-form P₂ over |x| ≤ `x_window`;
/// returns ‖oracle − closed‖/‖closed‖.
pub fn p2_shape_error(two: &TwoScatter, sys: &TwoAtomSystem, x_window: f64) -> Result<f64> {
    let (xs, p) = two.relative_profile();
    let bs = BoundState::new(two.k1, two.k2, sys)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (x, v) in xs.iter().zip(&p) {
        if x.abs() <= x_window {
            a.push(*v);
            b.push(bs.psi_relative(*x)?.norm_sqr());
        }
    }
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff = a.iter().zip(&b).map(|(x, y)| (x / na - y / nb).powi(2)).sum::<f64>().sqrt();
    Ok(diff)
}

/// Grid size giving a period of at least 6/σ + 20 over a band of half-width `r`.
pub fn modes_for_sigma(sigma: f64, r: f64) -> usize {
    let n = ((6.0 / sigma + 20.0) * 2.0 * r / std::f64::consts::TAU).ceil() as usize;
    (n + n % 2).max(MIN_MODES)
}

/// Off-support chiral weight (boxes of half-width 6σ) for each σ.
pub fn quench_sweep(
    sys: &TwoAtomSystem,
    k1: f64,
    k2: f64,
    centre: f64,
    half_width: f64,
    sigmas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    sigmas
        .iter()
        .map(|&s| {
            let n = modes_for_sigma(s, half_width);
            let model = build_discrete_model(sys, n, (centre - half_width, centre + half_width))?;
            let two = two_excitation_scatter(&model, k1, k2, s)?;
            Ok((s, two.off_support_weight(6.0 * s)))
        })
        .collect()
}

fn run_one(sc: &Scenario) -> Result<Vec<ReportRow>> {
    let sys = sc.system();
    match sc.kind {
        ScenarioKind::Transmission => {
            let model = build_discrete_model(&sys, sc.n_modes()?, sc.window())?;
            let out = single_excitation_scatter(&model, sc.k1, sc.sigma()?)?;
            let t = Response::new(&sc.closed_system())?.transmission(out.k_probe);
            let err = (out.t_hat - t).norm() / t.norm();
            Ok(vec![ReportRow::new(sc, "t", fmt_complex(t), fmt_complex(out.t_hat), err, sc.tol)])
        }
        ScenarioKind::P2Shape => {
            let model = build_discrete_model(&sys, sc.n_modes()?, sc.window())?;
            let two = two_excitation_scatter(&model, sc.k1, sc.k2, sc.sigma()?)?;
            let err = p2_shape_error(&two, &sc.closed_system(), sc.x_window)?;
            Ok(vec![ReportRow::new(sc, "p2_shape_l2", fmt_real(0.0), fmt_real(err), err, sc.tol)])
        }
        ScenarioKind::QuenchSweep => {
            let mut sigmas = sc.sigmas.clone();
            sigmas.sort_by(|a, b| b.total_cmp(a));
            let weights = quench_sweep(&sys, sc.k1, sc.k2, sc.centre(), sc.half_width, &sigmas)?;
            let mut rows = Vec::new();
            for w in weights.windows(2) {
                let ratio = w[1].1 / w[0].1;
                let q = format!("offsupport_ratio_sigma_{}_to_{}", w[0].0, w[1].0);
                rows.push(ReportRow::new(sc, &q, fmt_real(w[0].1), fmt_real(w[1].1), ratio, sc.tol));
            }
            Ok(rows)
        }
    }
}

/// Runs every scenario; a scenario that cannot run becomes one failing row.
pub fn comparison_report(scenarios: &[Scenario]) -> Vec<ReportRow> {
    scenarios
        .iter()
        .flat_map(|sc| run_one(sc).unwrap_or_else(|e| vec![ReportRow::failed(sc, &e)]))
        .collect()
}

pub fn write_report_csv<W: Write>(rows: &[ReportRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario_id", "quantity", "closed_form", "oracle", "rel_err", "tol", "pass"])?;
    for r in rows {
        w.write_record([
            r.scenario_id.clone(),
            r.quantity.clone(),
            r.closed_form.clone(),
            r.oracle.clone(),
            fmt_real(r.rel_err),
            fmt_real(r.tol),
            r.pass.to_string(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_file_parses() {
        let s = parse_scenarios(DEFAULT_SCENARIOS).unwrap();
        assert!(s.iter().any(|x| x.kind == ScenarioKind::P2Shape));
        assert!(s.iter().any(|x| x.kind == ScenarioKind::QuenchSweep));
    }

    #[test]
    fn empty_list_gives_empty_report() {
        assert!(parse_scenarios("").unwrap().is_empty());
        assert!(comparison_report(&[]).is_empty());
    }

    #[test]
    fn unknown_key_rejected() {
        let text = "[[scenario]]\nid='a'\nkind='transmission'\nomega_d=1\nk1=0\nhalf_width=10\ntol=1\nbogus=3\n";
        assert!(matches!(parse_scenarios(text), Err(Error::Scenario(_))));
    }

    #[test]
    fn mutated_resonance_fails() {
        let text = "[[scenario]]\nid='mut'\nkind='transmission'\nomega_d=2\nk1=-2\nsigma=0.05\nn_modes=512\nhalf_width=12.5\ntol=0.02\nmutate_omega2=0.5\n";
        let rows = comparison_report(&parse_scenarios(text).unwrap());
        assert_eq!(rows.len(), 1);
        assert!(!rows[0].pass, "{rows:?}");
        let clean = text.replace("mutate_omega2=0.5\n", "");
        assert!(comparison_report(&parse_scenarios(&clean).unwrap())[0].pass);
    }

    #[test]
    fn unrunnable_scenario_reports_failure() {
        let text = "[[scenario]]\nid='bad'\nkind='transmission'\nomega_d=2\nk1=2\nsigma=0.05\nn_modes=64\nhalf_width=12.5\ntol=0.02\n";
        let rows = comparison_report(&parse_scenarios(text).unwrap());
        assert!(!rows[0].pass && rows[0].quantity == "error");
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_report_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "scenario_id,quantity,closed_form,oracle,rel_err,tol,pass\n");
    }

    #[test]
    fn mode_count_rule() {
        assert_eq!(modes_for_sigma(0.1, 8.0), 256);
        assert!(modes_for_sigma(0.025, 8.0) as f64 * std::f64::consts::TAU / 16.0 >= 260.0);
    }
}
