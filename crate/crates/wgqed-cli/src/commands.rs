use std::f64::consts::TAU;
use std::io::Write;

use wgqed::single_photon::{linspace, poles, spectrum_sweep};
use wgqed::two_photon::{auto_x_grid, fluorescence_map, p2_profile};
use wgqed::{Error, TwoAtomSystem};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_num, Cell, Table};
use crate::verify;

pub const UNITS: &str = "energies and rates in gamma_bar = (1/tau1 + 1/tau2)/2, positions and times in 1/gamma_bar";

fn header(cfg: &RunConfig, command: &str, sys: &TwoAtomSystem, table: &mut Table) {
    table.meta("command", command);
    table.meta("units", UNITS);
    table.meta("config_sha256", cfg.hash());
    table.meta_num("tau_rescale", cfg.system.tau_rescale());
    table.meta_num("omega1", sys.atom1.omega);
    table.meta_num("omega2", sys.atom2.omega);
    table.meta_num("tau1", sys.atom1.tau);
    table.meta_num("tau2", sys.atom2.tau);
    table.meta_num("gamma_ng1", sys.atom1.gamma_ng);
    table.meta_num("gamma_ng2", sys.atom2.gamma_ng);
    table.meta_num("g", sys.g);
}

pub fn spectrum_table(cfg: &RunConfig) -> CliResult<Table> {
    cfg.validate()?;
    let sys = cfg.system.build()?;
    let s = &cfg.spectrum;
    let rows = spectrum_sweep(&linspace(s.k_min, s.k_max, s.points), &sys)?;
    let mut t = Table::new(&[
        ("k", "gamma_bar"),
        ("t_bar_re", ""),
        ("t_bar_im", ""),
        ("r_bar_re", ""),
        ("r_bar_im", ""),
        ("t_bar_sq", ""),
        ("r_bar_sq", ""),
    ]);
    header(cfg, "spectrum", &sys, &mut t);
    for r in rows {
        t.push(vec![
            r.k.into(),
            r.t_bar.re.into(),
            r.t_bar.im.into(),
            r.r_bar.re.into(),
            r.r_bar.im.into(),
            r.t_bar_sq.into(),
            r.r_bar_sq.into(),
        ]);
    }
    Ok(t)
}

pub fn fluorescence_table(cfg: &RunConfig) -> CliResult<Table> {
    cfg.validate()?;
    let sys = cfg.system.build()?;
    let f = &cfg.fluorescence;
    if let Some(out) = f.e_total_out {
        if (out - f.e_total).abs() > 1e-9 {
            return Err(Error::OffShell(out - f.e_total).into());
        }
    }
    let grid = linspace(f.delta_min, f.delta_max, f.points);
    let e = f.e_total + 2.0 * sys.omega_c();
    let map = fluorescence_map(e, &grid, &grid, &sys)?;
    let mut t = Table::new(&[("delta_i", "gamma_bar"), ("delta_o", "gamma_bar"), ("b_over_tau_bar_sq", "")]);
    header(cfg, "fluorescence-map", &sys, &mut t);
    t.meta_num("e_total_bar", f.e_total);
    t.meta("channel", "fluorescent part B only; the elastic t_p1 t_p2 delta terms are not included");
    for (i, di) in grid.iter().enumerate() {
        for (o, d_o) in grid.iter().enumerate() {
            t.push(vec![(*di).into(), (*d_o).into(), map.at(i, o).into()]);
        }
    }
    Ok(t)
}

pub fn bound_state_table(cfg: &RunConfig) -> CliResult<Table> {
    cfg.validate()?;
    let base = cfg.system.build()?;
    let b = &cfg.bound_state;
    let mut t = Table::new(&[("curve", ""), ("x", "1/gamma_bar"), ("p2", ""), ("p2_normalized", "")]);
    header(cfg, "bound-state", &base, &mut t);
    t.meta("p2_convention", "p2 = |psi_R(x/2, -x/2)|^2 unnormalized; p2_normalized divides by the curve maximum");
    for (j, curve) in b.curves.iter().enumerate() {
        let mut sc = cfg.system.clone();
        if let Some(od) = curve.omega_d {
            sc.set_omega_d(od);
        }
        let sys = sc.build()?;
        let k1 = b.k1.unwrap_or(sys.atom1.omega);
        let k2 = curve.k2.unwrap_or_else(|| sys.atom2.omega + curve.k2_offset.unwrap_or(0.0));
        let x = match (b.x_min, b.x_max, b.x_points) {
            (Some(lo), Some(hi), Some(n)) => linspace(lo, hi, n),
            _ => auto_x_grid(k1, k2, &sys),
        };
        let prof = p2_profile(k1, k2, &x, &sys)?;
        let d_b = sys.derived_scales(k1 + k2).d_b.norm();
        let key = |k: &str| format!("curve{j}.{k}");
        t.meta_num(&key("omega_d"), sys.omega_d());
        t.meta_num(&key("k1"), k1);
        t.meta_num(&key("k2"), k2);
        t.meta_num(&key("abs_d_b"), d_b);
        t.meta_num(&key("beat_period_expected"), TAU / d_b);
        t.meta(&key("beat_period"), prof.beat_period.map_or("none".to_string(), fmt_num));
        t.meta(&key("statistics"), prof.statistics.as_str());
        for (xv, (p, pn)) in prof.x.iter().zip(prof.p2.iter().zip(prof.normalized())) {
            t.push(vec![Cell::Num(j as f64), (*xv).into(), (*p).into(), pn.into()]);
        }
    }
    Ok(t)
}

pub fn poles_table(cfg: &RunConfig) -> CliResult<Table> {
    cfg.validate()?;
    let sys = cfg.system.build()?;
    let p = poles(&sys);
    let (wc, wd, gb) = (sys.omega_c(), sys.omega_d(), sys.gamma_bar());
    let mut t = Table::new(&[
        ("label", ""),
        ("re", "gamma_bar"),
        ("im", "gamma_bar"),
        ("approx_re", "gamma_bar"),
        ("approx_im", "gamma_bar"),
    ]);
    header(cfg, "poles", &sys, &mut t);
    t.meta("approximation", "subradiant omega_c - i omega_d^2/gamma, superradiant omega_c - 2i gamma, gamma = gamma_bar");
    let rows = [("subradiant", p.subradiant(), -wd * wd / gb), ("superradiant", p.superradiant(), -2.0 * gb)];
    for (name, root, approx_im) in rows {
        t.push(vec![name.into(), root.re.into(), root.im.into(), wc.into(), approx_im.into()]);
    }
    Ok(t)
}

pub fn cmd_spectrum<W: Write>(cfg: &RunConfig, out: W) -> CliResult<()> {
    spectrum_table(cfg)?.write(cfg.output.format, out)
}

pub fn cmd_fluorescence_map<W: Write>(cfg: &RunConfig, out: W) -> CliResult<()> {
    fluorescence_table(cfg)?.write(cfg.output.format, out)
}

pub fn cmd_bound_state<W: Write>(cfg: &RunConfig, out: W) -> CliResult<()> {
    bound_state_table(cfg)?.write(cfg.output.format, out)
}

pub fn cmd_poles<W: Write>(cfg: &RunConfig, out: W) -> CliResult<()> {
    poles_table(cfg)?.write(cfg.output.format, out)
}

/// Writes the report, then fails with a verification error if any check failed.
pub fn cmd_verify<W: Write>(cfg: &RunConfig, out: W) -> CliResult<()> {
    cfg.validate()?;
    let results = verify::run_suite(&cfg.verify)?;
    let mut t = verify::report_table(&results);
    t.meta("command", "verify");
    t.meta("config_sha256", cfg.hash());
    t.write(cfg.output.format, out)?;
    let failed: Vec<String> = results.iter().filter(|r| !r.pass()).map(|r| r.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("criteria {} failed", failed.join(", "))))
    }
}
