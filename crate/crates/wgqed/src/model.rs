//! Atom parameters, validation and the collective scales shared by the
//! single- and two-photon layers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{im, re, Cplx, Real};

/// One two-level atom: transition frequency, waveguide decay time and
/// decay rate into non-guided modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams<T> {
    pub omega: T,
    pub tau: T,
    #[serde(default)]
    pub gamma_ng: T,
}

impl<T: Real> AtomParams<T> {
    pub fn new(omega: T, tau: T) -> Self {
        Self { omega, tau, gamma_ng: T::zero() }
    }

    pub fn with_loss(mut self, gamma_ng: T) -> Self {
        self.gamma_ng = gamma_ng;
        self
    }

    pub fn gamma(&self) -> T {
        self.tau.recip()
    }

    /// Ω − iγ_ng: non-guided loss enters only through this substitution.
    pub fn omega_eff(&self) -> Cplx<T> {
        Cplx::new(self.omega, -self.gamma_ng)
    }

    fn check(&self, which: usize) -> Result<()> {
        let field = |name: &'static str| -> &'static str {
            match (which, name) {
                (1, "tau") => "atom1.tau",
                (1, "omega") => "atom1.omega",
                (1, _) => "atom1.gamma_ng",
                (_, "tau") => "atom2.tau",
                (_, "omega") => "atom2.omega",
                _ => "atom2.gamma_ng",
            }
        };
        if !(self.tau > T::zero()) {
            return Err(Error::InvalidParameter { field: field("tau"), message: "tau must be positive" });
        }
        if !self.tau.is_finite() {
            return Err(Error::InvalidParameter { field: field("tau"), message: "tau must be finite" });
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter { field: field("omega"), message: "omega must be finite" });
        }
        if !self.gamma_ng.is_finite() || self.gamma_ng < T::zero() {
            return Err(Error::InvalidParameter {
                field: field("gamma_ng"),
                message: "gamma_ng must be finite and non-negative",
            });
        }
        Ok(())
    }
}

/// Two collocated atoms plus an optional direct dipole-dipole rate `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomSystem<T> {
    pub atom1: AtomParams<T>,
    pub atom2: AtomParams<T>,
    #[serde(default)]
    pub g: T,
}

/// D_a, D_b and D_{1,2} at a given total two-photon energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveScales<T> {
    pub e_total: Cplx<T>,
    pub d_a: Cplx<T>,
    pub d_b: Cplx<T>,
    pub d1: Cplx<T>,
    pub d2: Cplx<T>,
}

impl<T: Real> CollectiveScales<T> {
    /// Same scales on the other branch of the square root: D_b → −D_b, D_1 ↔ D_2.
    pub fn flipped(&self) -> Self {
        Self { d_b: -self.d_b, d1: self.d2, d2: self.d1, ..*self }
    }
}

impl<T: Real> TwoAtomSystem<T> {
    pub fn new(atom1: AtomParams<T>, atom2: AtomParams<T>) -> Self {
        Self { atom1, atom2, g: T::zero() }
    }

    /// Atoms at Ω_c ± Ω_d with the given decay times and no loss.
    pub fn detuned(omega_c: T, omega_d: T, tau1: T, tau2: T) -> Self {
        Self::new(AtomParams::new(omega_c + omega_d, tau1), AtomParams::new(omega_c - omega_d, tau2))
    }

    pub fn with_g(mut self, g: T) -> Self {
        self.g = g;
        self
    }

    pub fn with_loss(mut self, gamma_ng1: T, gamma_ng2: T) -> Self {
        self.atom1.gamma_ng = gamma_ng1;
        self.atom2.gamma_ng = gamma_ng2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.atom1.check(1)?;
        self.atom2.check(2)?;
        if !self.g.is_finite() {
            return Err(Error::InvalidParameter { field: "g", message: "g must be finite" });
        }
        Ok(())
    }

    pub fn atom(&self, n: usize) -> &AtomParams<T> {
        if n == 1 {
            &self.atom1
        } else {
            &self.atom2
        }
    }

    /// Atom labels exchanged.
    pub fn swapped(&self) -> Self {
        Self { atom1: self.atom2, atom2: self.atom1, g: self.g }
    }

    pub fn omega_c(&self) -> T {
        (self.atom1.omega + self.atom2.omega) / T::lit(2.0)
    }

    pub fn omega_d(&self) -> T {
        (self.atom1.omega - self.atom2.omega) / T::lit(2.0)
    }

    pub fn gamma1(&self) -> T {
        self.atom1.gamma()
    }

    pub fn gamma2(&self) -> T {
        self.atom2.gamma()
    }

    /// γ̄ = (γ₁ + γ₂)/2, the unit of the command line and of all tolerances.
    pub fn gamma_bar(&self) -> T {
        (self.gamma1() + self.gamma2()) / T::lit(2.0)
    }

    /// τ̄ = √(τ₁τ₂).
    pub fn tau_bar(&self) -> T {
        (self.atom1.tau * self.atom2.tau).sqrt()
    }

    /// c = (τ₁τ₂)^(−1/2) + i·g.
    pub fn cross_coupling(&self) -> Cplx<T> {
        Cplx::new(self.tau_bar().recip(), self.g)
    }

    pub fn lossless(&self) -> bool {
        self.atom1.gamma_ng == T::zero() && self.atom2.gamma_ng == T::zero()
    }

    pub fn require_no_dipole(&self) -> Result<()> {
        if self.g == T::zero() {
            Ok(())
        } else {
            Err(Error::DipoleDipole)
        }
    }

    /// D_a, D_b (principal root) and D_{1,2} = (D_a ± D_b)/2 at total energy `e_total`,
    /// with both resonances complexified by their non-guided loss.
    pub fn derived_scales(&self, e_total: T) -> CollectiveScales<T> {
        let (g1, g2) = (self.gamma1(), self.gamma2());
        let w1 = self.atom1.omega_eff();
        let w2 = self.atom2.omega_eff();
        let two = T::lit(2.0);
        let omega_c = (w1 + w2) / two;
        let omega_d = (w1 - w2) / two;
        let e = re(e_total);
        let d_a = e - omega_c * two + im(g1 + g2);
        let four = T::lit(4.0);
        let disc = omega_d * omega_d * four + im(four * (g1 - g2)) * omega_d - re((g1 + g2) * (g1 + g2));
        let d_b = disc.sqrt();
        CollectiveScales { e_total: e, d_a, d_b, d1: (d_a + d_b) / two, d2: (d_a - d_b) / two }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(omega_d: f64, tau1: f64, tau2: f64) -> TwoAtomSystem<f64> {
        TwoAtomSystem::detuned(0.3, omega_d, tau1, tau2)
    }

    #[test]
    fn degenerate_scales() {
        let s = sys(0.0, 1.0, 1.0).derived_scales(0.6);
        assert!((s.d_b - Cplx::new(0.0, 2.0)).norm() < 1e-15);
        assert!((s.d_a - Cplx::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn beat_scale_at_six() {
        let s = sys(6.0, 1.0, 1.0).derived_scales(1.0);
        assert!((s.d_b.norm() - 140f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn validation_messages() {
        let bad = TwoAtomSystem::new(AtomParams::new(0.0, 0.0), AtomParams::new(0.0, 1.0));
        let err = bad.validate().unwrap_err();
        assert!(err.to_string().contains("tau must be positive"));
        let lossy = sys(0.0, 1.0, 1.0).with_loss(0.0, -0.1);
        assert!(matches!(lossy.validate(), Err(Error::InvalidParameter { field: "atom2.gamma_ng", .. })));
        assert!(sys(0.0, 1.0, 1.0).validate().is_ok());
        let nan = TwoAtomSystem::new(AtomParams::new(f64::NAN, 1.0), AtomParams::new(0.0, 1.0));
        assert!(nan.validate().is_err());
    }

    #[test]
    fn centre_and_offset_recombine() {
        let s = TwoAtomSystem::new(AtomParams::new(1.25, 1.0), AtomParams::new(-0.5, 2.0));
        assert_eq!(s.omega_c() + s.omega_d(), 1.25);
        assert_eq!(s.omega_c() - s.omega_d(), -0.5);
        assert_eq!(s.with_g(0.0).cross_coupling().im, 0.0);
    }

    #[test]
    fn works_in_single_precision() {
        let s = TwoAtomSystem::<f32>::detuned(0.0, 6.0, 1.0, 1.0).derived_scales(0.0);
        assert!((s.d_b.norm() - 140f32.sqrt()).abs() < 1e-4);
    }
}
