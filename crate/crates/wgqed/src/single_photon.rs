//! Single-photon excitation amplitudes, transmission through the chiral mode and
//! the waveguide, and the two poles of the single-excitation resolvent.

use crate::error::{Error, Result};
use crate::model::TwoAtomSystem;
use crate::scalar::{im, re, Cplx, Real};

/// Excitation amplitudes of atom 1 and atom 2 for a photon of energy k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationPair<T> {
    pub s1: Cplx<T>,
    pub s2: Cplx<T>,
}

impl<T: Real> ExcitationPair<T> {
    pub fn get(&self, n: usize) -> Cplx<T> {
        if n == 1 {
            self.s1
        } else {
            self.s2
        }
    }

    /// Relative distance as a 2-vector.
    pub fn rel_diff(&self, other: &Self) -> T {
        let num = ((self.s1 - other.s1).norm_sqr() + (self.s2 - other.s2).norm_sqr()).sqrt();
        let den = (other.s1.norm_sqr() + other.s2.norm_sqr()).sqrt();
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleKind {
    Subradiant,
    Superradiant,
}

/// The two roots of Q(k) = (k − Ω₁ + iγ₁)(k − Ω₂ + iγ₂) + c².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSet<T> {
    pub roots: [Cplx<T>; 2],
    pub labels: [PoleKind; 2],
}

impl<T: Real> PoleSet<T> {
    fn pick(&self, kind: PoleKind) -> Cplx<T> {
        if self.labels[0] == kind {
            self.roots[0]
        } else {
            self.roots[1]
        }
    }

    pub fn subradiant(&self) -> Cplx<T> {
        self.pick(PoleKind::Subradiant)
    }

    pub fn superradiant(&self) -> Cplx<T> {
        self.pick(PoleKind::Superradiant)
    }
}

/// Roots of (u − a₁)(u − a₂) + w-cancelled constant, with a_n = δ_n + w_n and the
/// constant term equal to −w₁w₂ + extra. The product of roots
/// δ₁δ₂ + δ₁w₂ + δ₂w₁ + extra is formed without the w₁w₂ cancellation, then the
/// small root follows from the large one.
fn stable_roots<T: Real>(d: [Cplx<T>; 2], w: [Cplx<T>; 2], extra: Cplx<T>) -> [Cplx<T>; 2] {
    let two = T::lit(2.0);
    let half_sum = (d[0] + d[1] + w[0] + w[1]) / two;
    let half_diff = (d[0] - d[1] + w[0] - w[1]) / two;
    let product = d[0] * d[1] + d[0] * w[1] + d[1] * w[0] + extra;
    let root_h = (half_diff * half_diff + w[0] * w[1] - extra).sqrt();
    let sign = if (half_sum.conj() * root_h).re >= T::zero() { T::one() } else { -T::one() };
    let big = half_sum + root_h * sign;
    if big == Cplx::new(T::zero(), T::zero()) {
        return [big, big];
    }
    [big, product / big]
}

fn offsets<T: Real>(sys: &TwoAtomSystem<T>) -> [Cplx<T>; 2] {
    let wc = sys.omega_c();
    [sys.atom1.omega_eff() - re(wc), sys.atom2.omega_eff() - re(wc)]
}

/// Poles of the single-photon response, labelled by |Im|.
pub fn poles<T: Real>(sys: &TwoAtomSystem<T>) -> PoleSet<T> {
    let (g1, g2) = (sys.gamma1(), sys.gamma2());
    let c = sys.cross_coupling();
    let extra = c * c - re(g1 * g2);
    let u = stable_roots(offsets(sys), [im(-g1), im(-g2)], extra);
    let wc = re(sys.omega_c());
    let roots = [u[0] + wc, u[1] + wc];
    let (a, b) = (roots[0].im.abs(), roots[1].im.abs());
    let first_sub = if (a - b).abs() < T::lit(1e-9) * sys.gamma_bar() {
        roots[0].re <= roots[1].re
    } else {
        a < b
    };
    let labels = if first_sub {
        [PoleKind::Subradiant, PoleKind::Superradiant]
    } else {
        [PoleKind::Superradiant, PoleKind::Subradiant]
    };
    PoleSet { roots, labels }
}

/// Q(k) evaluated directly from its definition.
pub fn denominator<T: Real>(k: T, sys: &TwoAtomSystem<T>) -> Cplx<T> {
    let a1 = sys.atom1.omega_eff() - im(sys.gamma1());
    let a2 = sys.atom2.omega_eff() - im(sys.gamma2());
    let c = sys.cross_coupling();
    (re(k) - a1) * (re(k) - a2) + c * c
}

/// Frequency-domain solve of the single-excitation equations of motion. Honors
/// both g and the non-guided loss.
pub fn excitation_amplitudes<T: Real>(k: T, sys: &TwoAtomSystem<T>) -> Result<ExcitationPair<T>> {
    let two = T::lit(2.0);
    let i = im(T::one());
    let c = sys.cross_coupling();
    let m11 = re(k) - sys.atom1.omega_eff() + im(sys.gamma1());
    let m22 = re(k) - sys.atom2.omega_eff() + im(sys.gamma2());
    let m12 = i * c;
    let det = m11 * m22 - m12 * m12;
    let scale = m11.norm() * m22.norm() + m12.norm_sqr();
    if det.norm() <= T::lit(16.0) * T::epsilon() * scale {
        return Err(Error::DegeneratePole);
    }
    let b1 = re((two * sys.gamma1()).sqrt());
    let b2 = re((two * sys.gamma2()).sqrt());
    Ok(ExcitationPair { s1: (b1 * m22 - m12 * b2) / det, s2: (m11 * b2 - m12 * b1) / det })
}

/// s_n = √(2/τ_n)(k − Ω_other)/Q(k), evaluated literally (g = 0).
pub fn excitation_closed_form<T: Real>(k: T, sys: &TwoAtomSystem<T>) -> Result<ExcitationPair<T>> {
    sys.require_no_dipole()?;
    let two = T::lit(2.0);
    let q = denominator(k, sys);
    let s1 = re((two * sys.gamma1()).sqrt()) * (re(k) - sys.atom2.omega_eff()) / q;
    let s2 = re((two * sys.gamma2()).sqrt()) * (re(k) - sys.atom1.omega_eff()) / q;
    Ok(ExcitationPair { s1, s2 })
}

/// Pole/zero data of the single-photon response for a g = 0 system. Every
/// rational function is evaluated in factored form, cancelling zero/pole pairs
/// closer than 1e−10·γ̄ so degenerate systems never divide 0/0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response<T> {
    pub sys: TwoAtomSystem<T>,
    pub poles: PoleSet<T>,
    zeros: [Cplx<T>; 2],
    tol: T,
}

fn factored<T: Real>(k: T, zeros: &[Cplx<T>], poles: &[Cplx<T>; 2], tol: T) -> Cplx<T> {
    let kk = re(k);
    let mut used = [false; 2];
    let mut value = Cplx::new(T::one(), T::zero());
    for z in zeros {
        let hit = (0..2).find(|&j| !used[j] && (*z - poles[j]).norm() < tol);
        match hit {
            Some(j) => used[j] = true,
            None => value = value * (kk - *z),
        }
    }
    for j in 0..2 {
        if !used[j] {
            value = value / (kk - poles[j]);
        }
    }
    value
}

impl<T: Real> Response<T> {
    pub fn new(sys: &TwoAtomSystem<T>) -> Result<Self> {
        sys.validate()?;
        sys.require_no_dipole()?;
        let (g1, g2) = (sys.gamma1(), sys.gamma2());
        let zeros_u = stable_roots(offsets(sys), [im(g1), im(g2)], Cplx::new(T::zero(), T::zero()));
        let wc = re(sys.omega_c());
        Ok(Self {
            sys: *sys,
            poles: poles(sys),
            zeros: [zeros_u[0] + wc, zeros_u[1] + wc],
            tol: T::lit(1e-10) * sys.gamma_bar(),
        })
    }

    /// Chiral transmission t_k.
    pub fn transmission(&self, k: T) -> Cplx<T> {
        factored(k, &self.zeros, &self.poles.roots, self.tol)
    }

    /// (t̄_k, r̄_k) = ((t_k + 1)/2, (t_k − 1)/2).
    pub fn waveguide(&self, k: T) -> (Cplx<T>, Cplx<T>) {
        let t = self.transmission(k);
        let one = re(T::one());
        let two = T::lit(2.0);
        ((t + one) / two, (t - one) / two)
    }

    /// Excitation amplitudes with the removable singularities cancelled.
    pub fn excitation(&self, k: T) -> ExcitationPair<T> {
        let two = T::lit(2.0);
        let s = &self.sys;
        let z1 = [s.atom2.omega_eff()];
        let z2 = [s.atom1.omega_eff()];
        let r = &self.poles.roots;
        ExcitationPair {
            s1: factored(k, &z1, r, self.tol) * (two * s.gamma1()).sqrt(),
            s2: factored(k, &z2, r, self.tol) * (two * s.gamma2()).sqrt(),
        }
    }
}

pub fn transmission_chiral<T: Real>(k: T, sys: &TwoAtomSystem<T>) -> Result<Cplx<T>> {
    Ok(Response::new(sys)?.transmission(k))
}

pub fn transmission_reflection_waveguide<T: Real>(k: T, sys: &TwoAtomSystem<T>) -> Result<(Cplx<T>, Cplx<T>)> {
    Ok(Response::new(sys)?.waveguide(k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow<T> {
    pub k: T,
    pub t_bar: Cplx<T>,
    pub r_bar: Cplx<T>,
    pub t_bar_sq: T,
    pub r_bar_sq: T,
}

pub fn spectrum_sweep<T: Real>(k_grid: &[T], sys: &TwoAtomSystem<T>) -> Result<Vec<SpectrumRow<T>>> {
    if k_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::UnsortedGrid);
    }
    let resp = Response::new(sys)?;
    Ok(k_grid
        .iter()
        .map(|&k| {
            let (t_bar, r_bar) = resp.waveguide(k);
            SpectrumRow { k, t_bar, r_bar, t_bar_sq: t_bar.norm_sqr(), r_bar_sq: r_bar.norm_sqr() }
        })
        .collect())
}

/// Uniform grid of `n` points over `[lo, hi]`, `n ≥ 2`.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::from_usize(n - 1).unwrap_or_else(T::one);
    (0..n).map(|j| if j + 1 == n { hi } else { lo + step * T::from_usize(j).unwrap_or_else(T::zero) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AtomParams;
    use proptest::prelude::*;

    fn sym(omega_d: f64) -> TwoAtomSystem<f64> {
        TwoAtomSystem::detuned(0.0, omega_d, 1.0, 1.0)
    }

    #[test]
    fn degenerate_roots_are_exact() {
        let p = poles(&TwoAtomSystem::detuned(0.7, 0.0, 1.0, 1.0));
        assert_eq!(p.subradiant(), Cplx::new(0.7, 0.0));
        assert_eq!(p.superradiant(), Cplx::new(0.7, -2.0));
    }

    #[test]
    fn subradiant_root_is_half_the_quoted_estimate() {
        // Exact: −γ + √(γ² − Ω_d²) ≈ −Ω_d²/(2γ).
        for od in [0.01, 0.05, 0.1, 0.2] {
            let r = poles(&sym(od)).subradiant();
            let exact = -od * od / (1.0 + (1.0 - od * od).sqrt());
            assert!(((r.im - exact) / exact).abs() <= 1e-13, "{od}");
            let ratio = r.im / (-od * od);
            assert!((ratio - 0.5).abs() < 0.02, "{ratio}");
        }
    }

    #[test]
    fn tiny_splitting_keeps_relative_accuracy() {
        let od = 1e-7;
        let r = poles(&sym(od)).subradiant();
        let exact = -od * od / (1.0 + (1.0 - od * od).sqrt());
        assert!(((r.im - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn superradiant_limit() {
        let r = poles(&sym(1e-4)).superradiant();
        assert!((r.im + 2.0).abs() < 1e-7);
    }

    #[test]
    fn roots_satisfy_quadratic() {
        let s = TwoAtomSystem::new(AtomParams::new(1.3, 0.7), AtomParams::new(-0.4, 1.9))
            .with_g(0.3)
            .with_loss(0.05, 0.1);
        for r in poles(&s).roots {
            // Q at complex argument.
            let a1 = s.atom1.omega_eff() - im(s.gamma1());
            let a2 = s.atom2.omega_eff() - im(s.gamma2());
            let c = s.cross_coupling();
            assert!(((r - a1) * (r - a2) + c * c).norm() < 1e-13);
        }
    }

    #[test]
    fn labels_tie_break_on_real_part() {
        // Equal |Im| for well separated identical-rate atoms above the exceptional point.
        let p = poles(&sym(6.0));
        assert!(p.subradiant().re < p.superradiant().re);
        assert_eq!(p, poles(&sym(6.0)));
    }

    #[test]
    fn zero_transmission_at_resonances() {
        for od in [0.25, 2.0, 6.0] {
            let r = Response::new(&sym(od)).unwrap();
            for k in [od, -od] {
                let (tb, rb) = r.waveguide(k);
                assert!(tb.norm() <= 1e-12, "{od} {k} {tb}");
                assert!((rb + 1.0).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_transmission_is_single_pole() {
        let r = Response::new(&sym(0.0)).unwrap();
        for k in [-3.0, -0.1, 0.0, 1e-13, 2.5] {
            let expect = Cplx::new(k, -2.0) / Cplx::new(k, 2.0);
            assert!((r.transmission(k) - expect).norm() < 1e-14, "{k}");
        }
    }

    #[test]
    fn degenerate_linear_solve_reports() {
        assert_eq!(excitation_amplitudes(0.0, &sym(0.0)), Err(Error::DegeneratePole));
        let s = Response::new(&sym(0.0)).unwrap().excitation(0.0);
        assert!((s.s1 - Cplx::new(0.0, -(2f64).sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn resonance_zero_of_atom_one_amplitude() {
        let s = excitation_amplitudes(-2.0, &sym(2.0)).unwrap();
        assert!(s.s1.norm() < 1e-15);
    }

    #[test]
    fn eit_peak_at_centre() {
        let (tb, _) = Response::new(&sym(0.5)).unwrap().waveguide(0.0);
        assert!((tb.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn far_detuned_limit() {
        let (tb, rb) = Response::new(&sym(1.0)).unwrap().waveguide(1e7);
        assert!((tb - 1.0).norm() < 1e-6 && rb.norm() < 1e-6);
    }

    #[test]
    fn transmission_agrees_with_amplitudes() {
        let s: TwoAtomSystem<f64> = TwoAtomSystem::new(AtomParams::new(0.8, 1.0), AtomParams::new(-0.3, 0.6));
        let resp = Response::new(&s).unwrap();
        for k in linspace(-4.0, 4.0, 41) {
            let a = excitation_amplitudes(k, &s).unwrap();
            let t = Cplx::new(1.0, 0.0)
                - Cplx::new(0.0, 1.0) * ((2.0 * s.gamma1()).sqrt() * a.s1 + (2.0 * s.gamma2()).sqrt() * a.s2);
            assert!((t - resp.transmission(k)).norm() < 1e-13);
            assert!(resp.excitation(k).rel_diff(&a) < 1e-13);
        }
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        assert_eq!(spectrum_sweep::<f64>(&[], &sym(1.0)), Err(Error::EmptyGrid));
        assert_eq!(spectrum_sweep(&[1.0, 1.0], &sym(1.0)), Err(Error::UnsortedGrid));
        let rows = spectrum_sweep(&[-2.0, 2.0], &sym(2.0)).unwrap();
        assert!(rows.iter().all(|r| r.t_bar_sq < 1e-24));
    }

    #[test]
    fn dipole_coupling_blocks_closed_forms() {
        assert_eq!(transmission_chiral(0.0, &sym(1.0).with_g(0.1)), Err(Error::DipoleDipole));
        assert!(excitation_amplitudes(0.0, &sym(1.0).with_g(0.1)).is_ok());
    }

    #[test]
    fn single_precision_transmission() {
        let r = Response::new(&TwoAtomSystem::<f32>::detuned(0.0, 2.0, 1.0, 1.0)).unwrap();
        assert!(r.waveguide(2.0).0.norm() < 1e-6);
        assert!((r.transmission(0.3).norm() - 1.0).abs() < 1e-6);
    }

    fn arb_system() -> impl Strategy<Value = TwoAtomSystem<f64>> {
        (-3.0..3.0f64, -3.0..3.0f64, 0.2..5.0f64, 0.2..5.0f64)
            .prop_map(|(w1, w2, t1, t2)| TwoAtomSystem::new(AtomParams::new(w1, t1), AtomParams::new(w2, t2)))
    }

    proptest! {
        #[test]
        fn unit_modulus(sys in arb_system(), k in -20.0..20.0f64) {
            let t = transmission_chiral(k, &sys).unwrap();
            prop_assert!((t.norm() - 1.0).abs() < 1e-12);
            let (tb, rb) = transmission_reflection_waveguide(k, &sys).unwrap();
            prop_assert!((tb.norm_sqr() + rb.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn lossy_transmission_bounded(sys in arb_system(), l1 in 0.0..1.0f64, l2 in 0.0..1.0f64, k in -20.0..20.0f64) {
            let t = transmission_chiral(k, &sys.with_loss(l1, l2)).unwrap();
            prop_assert!(t.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn relabelling_leaves_transmission(sys in arb_system(), k in -20.0..20.0f64) {
            let a = transmission_chiral(k, &sys).unwrap();
            let b = transmission_chiral(k, &sys.swapped()).unwrap();
            prop_assert!((a - b).norm() < 1e-12);
        }

        #[test]
        fn solve_matches_closed_form(sys in arb_system(), k in -20.0..20.0f64) {
            let a = excitation_amplitudes(k, &sys).unwrap();
            let b = excitation_closed_form(k, &sys).unwrap();
            prop_assert!(a.rel_diff(&b) < 1e-12);
        }

        #[test]
        fn pole_sum_and_sign(sys in arb_system()) {
            let p = poles(&sys);
            let sum = p.roots[0] + p.roots[1];
            let want = Cplx::new(sys.atom1.omega + sys.atom2.omega, -sys.gamma1() - sys.gamma2());
            prop_assert!((sum - want).norm() < 1e-12);
            prop_assert!(p.roots.iter().all(|r| r.im <= 1e-15));
            prop_assert!(p.subradiant().im.abs() <= p.superradiant().im.abs() + 1e-9);
        }
    }
}
