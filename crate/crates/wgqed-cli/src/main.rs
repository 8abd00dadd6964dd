use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wgqed_cli::commands::{cmd_bound_state, cmd_fluorescence_map, cmd_poles, cmd_spectrum, cmd_verify};
use wgqed_cli::{CliError, CliResult, Format, RunConfig};

#[derive(Parser)]
#[command(name = "wgqed", version, about = "Two-atom waveguide QED scattering data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Single-photon transmission and reflection
    Spectrum,
    /// Normalized fluorescence |B/τ̄|² over (Δ_i, Δ_o)
    FluorescenceMap,
    /// Two-photon correlation P₂(x) of the transmitted state
    BoundState,
    /// Sub- and superradiant poles
    Poles,
    /// Run the acceptance suite
    Verify,
}

/// Rates and energies in units of γ̄.
#[derive(clap::Args)]
struct Opts {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    preset: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_d: Option<f64>,
    /// Ē = E − 2Ω_c
    #[arg(long, global = true, allow_hyphen_values = true)]
    e_total: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    k1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    k2: Option<f64>,
    #[arg(long, global = true)]
    tau1: Option<f64>,
    #[arg(long, global = true)]
    tau2: Option<f64>,
    /// Applied to both atoms
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma_ng: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    g: Option<f64>,
}

fn resolve(o: &Opts) -> CliResult<RunConfig> {
    let mut c = match (&o.config, &o.preset) {
        (Some(_), Some(_)) => return Err(CliError::Validation("--config and --preset are exclusive".into())),
        (Some(p), None) => RunConfig::load(p)?,
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => RunConfig::default(),
    };
    if let Some(v) = o.omega_d {
        c.system.set_omega_d(v);
        c.bound_state.curves.iter_mut().for_each(|cv| cv.omega_d = None);
    }
    if let Some(v) = o.e_total {
        c.fluorescence.e_total = v;
    }
    if let Some(v) = o.k1 {
        c.bound_state.k1 = Some(v);
    }
    if let Some(v) = o.k2 {
        c.bound_state.curves = vec![wgqed_cli::config::CurveConfig { k2: Some(v), ..Default::default() }];
    }
    if let Some(v) = o.tau1 {
        c.system.tau1 = v;
    }
    if let Some(v) = o.tau2 {
        c.system.tau2 = v;
    }
    if let Some(v) = o.gamma_ng {
        c.system.gamma_ng1 = v;
        c.system.gamma_ng2 = v;
    }
    if let Some(v) = o.g {
        c.system.g = v;
    }
    if let Some(p) = &o.out {
        c.output.out = Some(p.clone());
    }
    if let Some(f) = o.format {
        c.output.format = f;
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = resolve(&cli.opts)?;
    let mut buf = Vec::new();
    let status = match cli.command {
        Command::Spectrum => cmd_spectrum(&cfg, &mut buf),
        Command::FluorescenceMap => cmd_fluorescence_map(&cfg, &mut buf),
        Command::BoundState => cmd_bound_state(&cfg, &mut buf),
        Command::Poles => cmd_poles(&cfg, &mut buf),
        Command::Verify => cmd_verify(&cfg, &mut buf),
    };
    if let Err(e @ CliError::Validation(_)) = status {
        return Err(e);
    }
    match &cfg.output.out {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            w.write_all(&buf)?;
            w.flush()?;
        }
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    status
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wgqed: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
