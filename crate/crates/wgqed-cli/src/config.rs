//! Run configuration. Frequencies and rates are in units of γ̄ = (1/τ₁ + 1/τ₂)/2,
//! times and positions in 1/γ̄. Decay times whose mean rate is not 1 are rescaled
//! by a common factor so that it is, keeping τ₂/τ₁.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wgqed::{AtomParams, TwoAtomSystem};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub omega1: f64,
    pub omega2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub gamma_ng1: f64,
    pub gamma_ng2: f64,
    pub g: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self { omega1: 2.0, omega2: -2.0, tau1: 1.0, tau2: 1.0, gamma_ng1: 0.0, gamma_ng2: 0.0, g: 0.0 }
    }
}

impl SystemConfig {
    pub fn omega_c(&self) -> f64 {
        0.5 * (self.omega1 + self.omega2)
    }

    pub fn omega_d(&self) -> f64 {
        0.5 * (self.omega1 - self.omega2)
    }

    pub fn set_omega_d(&mut self, omega_d: f64) {
        let c = self.omega_c();
        self.omega1 = c + omega_d;
        self.omega2 = c - omega_d;
    }

    /// Factor applied to both decay times so that the mean rate is 1.
    pub fn tau_rescale(&self) -> f64 {
        0.5 * (1.0 / self.tau1 + 1.0 / self.tau2)
    }

    pub fn build(&self) -> CliResult<TwoAtomSystem> {
        for (name, v) in [("tau1", self.tau1), ("tau2", self.tau2)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Validation(format!("{name}: tau must be positive")));
            }
        }
        let s = self.tau_rescale();
        let sys = TwoAtomSystem::new(
            AtomParams::new(self.omega1, self.tau1 * s).with_loss(self.gamma_ng1),
            AtomParams::new(self.omega2, self.tau2 * s).with_loss(self.gamma_ng2),
        )
        .with_g(self.g);
        sys.validate()?;
        Ok(sys)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { k_min: -8.0, k_max: 8.0, points: 1601 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluorescenceConfig {
    /// Ē = E − 2Ω_c.
    pub e_total: f64,
    /// Outgoing Ē; the map only exists on shell, so this must equal `e_total` when given.
    pub e_total_out: Option<f64>,
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
}

impl Default for FluorescenceConfig {
    fn default() -> Self {
        Self { e_total: 3.0, e_total_out: None, delta_min: -5.0, delta_max: 5.0, points: 201 }
    }
}

/// One P₂ curve. Exactly one of `k2` (absolute) and `k2_offset` (k₂ − Ω₂) is set;
/// `omega_d` overrides the system splitting for this curve only.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveConfig {
    pub k2: Option<f64>,
    pub k2_offset: Option<f64>,
    pub omega_d: Option<f64>,
}

impl CurveConfig {
    fn offset(k2_offset: f64) -> Self {
        Self { k2_offset: Some(k2_offset), ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundStateConfig {
    /// Defaults to Ω₁ of each curve's system.
    pub k1: Option<f64>,
    pub curves: Vec<CurveConfig>,
    /// When all three are absent the range is chosen from the decay lengths.
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub x_points: Option<usize>,
}

impl Default for BoundStateConfig {
    fn default() -> Self {
        Self { k1: None, curves: vec![CurveConfig::offset(2.0)], x_min: None, x_max: None, x_points: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Oracle scenario file; the built-in set when absent.
    pub scenarios: Option<PathBuf>,
    /// Replaces every error tolerance of the suite.
    pub tolerance: Option<f64>,
    /// Subset of criteria to run; all when absent.
    pub criteria: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub out: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub spectrum: SpectrumConfig,
    pub fluorescence: FluorescenceConfig,
    pub bound_state: BoundStateConfig,
    pub verify: VerifyConfig,
    pub output: OutputConfig,
}

pub const PRESETS: [&str; 7] = ["fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c"];

fn symmetric(omega_d: f64) -> SystemConfig {
    SystemConfig { omega1: omega_d, omega2: -omega_d, ..SystemConfig::default() }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `fig1*` presets set the fluorescence map (τ₁ = τ₂ = 1), `fig2*` presets the
    /// bound-state curves, all with k₁ = Ω₁.
    pub fn preset(name: &str) -> CliResult<Self> {
        let mut c = Self::default();
        match name {
            "fig1a" | "fig1b" | "fig1c" | "fig1d" => {
                let (e, od) = match name {
                    "fig1a" => (3.0, 1.0),
                    "fig1b" => (3.0, 0.5),
                    "fig1c" => (3.0, 0.0),
                    _ => (0.0, 1.0),
                };
                c.system = symmetric(od);
                c.fluorescence.e_total = e;
            }
            "fig2a" => {
                c.system = symmetric(2.0);
                c.bound_state.curves = [2.0, 1.0, 0.25].map(CurveConfig::offset).to_vec();
            }
            "fig2b" => {
                c.system = symmetric(6.0);
                c.bound_state.curves = [6.0, 0.25].map(CurveConfig::offset).to_vec();
            }
            "fig2c" => {
                c.system = symmetric(0.5);
                c.bound_state.curves = [0.75, 0.5, 0.25]
                    .map(|od| CurveConfig { k2: None, k2_offset: Some(od), omega_d: Some(od) })
                    .to_vec();
            }
            other => {
                return Err(CliError::Validation(format!(
                    "unknown preset {other:?}; expected one of {}",
                    PRESETS.join(", ")
                )))
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.system.build()?;
        let grid = |name: &str, lo: f64, hi: f64, n: usize| {
            if n < 2 {
                return Err(CliError::Validation(format!("{name}: need at least 2 points, got {n}")));
            }
            if !(hi > lo) {
                return Err(CliError::Validation(format!("{name}: empty range [{lo}, {hi}]")));
            }
            Ok(())
        };
        grid("spectrum", self.spectrum.k_min, self.spectrum.k_max, self.spectrum.points)?;
        let f = &self.fluorescence;
        grid("fluorescence", f.delta_min, f.delta_max, f.points)?;
        let b = &self.bound_state;
        if b.curves.is_empty() {
            return Err(CliError::Validation("bound_state: no curves".into()));
        }
        for (j, cv) in b.curves.iter().enumerate() {
            if cv.k2.is_some() == cv.k2_offset.is_some() {
                return Err(CliError::Validation(format!("bound_state.curves[{j}]: set exactly one of k2, k2_offset")));
            }
        }
        match (b.x_min, b.x_max, b.x_points) {
            (None, None, None) => {}
            (Some(lo), Some(hi), Some(n)) => grid("bound_state x", lo, hi, n)?,
            _ => return Err(CliError::Validation("bound_state: give all of x_min, x_max, x_points or none".into())),
        }
        if let Some(t) = self.verify.tolerance {
            if !(t >= 0.0) {
                return Err(CliError::Validation(format!("verify.tolerance: must be non-negative, got {t}")));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical TOML form, output settings excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        let text = toml::to_string(&c).unwrap_or_default();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        RunConfig::default().validate().unwrap();
        for p in PRESETS {
            RunConfig::preset(p).unwrap().validate().unwrap();
        }
        assert!(RunConfig::preset("fig3").is_err());
    }

    #[test]
    fn rates_are_rescaled_to_unit_mean() {
        let s = SystemConfig { tau1: 1.0, tau2: 2.0, ..SystemConfig::default() };
        let sys = s.build().unwrap();
        assert!((sys.gamma_bar() - 1.0).abs() < 1e-15);
        assert!((sys.atom2.tau / sys.atom1.tau - 2.0).abs() < 1e-15);
    }

    #[test]
    fn parses_partial_file() {
        let c = RunConfig::from_toml("[system]\nomega1 = 0.5\nomega2 = -0.5\n[spectrum]\npoints = 11\n").unwrap();
        assert_eq!(c.system.omega_d(), 0.5);
        assert_eq!(c.spectrum.points, 11);
        assert_eq!(c.spectrum.k_min, -8.0);
        assert!(RunConfig::from_toml("[system]\nomega3 = 1\n").is_err());
    }

    #[test]
    fn invalid_inputs_are_named() {
        let mut c = RunConfig::default();
        c.system.tau1 = 0.0;
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("tau must be positive"), "{e}");
        let mut c = RunConfig::default();
        c.spectrum.points = 1;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.spectrum.k_max = c.spectrum.k_min;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.system.gamma_ng1 = -0.1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_ignores_output_settings() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output.format = Format::Json;
        assert_eq!(a.hash(), b.hash());
        b.system.g = 0.1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
