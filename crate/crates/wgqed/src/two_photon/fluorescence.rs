//! The inelastic part B of the two-photon S-matrix, fluorescence maps and the
//! quench residual.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::TwoAtomSystem;
use crate::scalar::{i_unit, re, Cplx, Real};
use crate::single_photon::Response;

/// t_{p1}t_{p2} and B for one on-shell argument tuple. The elastic part multiplies
/// delta pairings and the fluorescent part δ(E_in − E_out); the two are never summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonElement<T> {
    pub elastic_coeff: Cplx<T>,
    pub fluorescence_b: Cplx<T>,
    pub e_in: T,
    pub e_out: T,
}

/// |B/τ̄|² over (Δ_i, Δ_o) at fixed total energy, row-major in Δ_i.
#[derive(Debug, Clone, PartialEq)]
pub struct FluorescenceGrid<T> {
    pub e_total: T,
    pub delta_i: Vec<T>,
    pub delta_o: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> FluorescenceGrid<T> {
    pub fn at(&self, i: usize, o: usize) -> T {
        self.values[i * self.delta_o.len() + o]
    }

    /// Cut at fixed Δ_i index, as a function of Δ_o.
    pub fn row(&self, i: usize) -> &[T] {
        let n = self.delta_o.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }
}

impl<T: Real> Response<T> {
    /// B(k₁,k₂,p₁,p₂), the coefficient of δ(E_in − E_out).
    pub fn fluorescence_b(&self, k1: T, k2: T, p1: T, p2: T) -> Cplx<T> {
        let s = &self.sys;
        let (sk1, sk2, sp1, sp2) = (self.excitation(k1), self.excitation(k2), self.excitation(p1), self.excitation(p2));
        let big_p1 = sp1.s1 * sp2.s1;
        let big_p2 = sp1.s2 * sp2.s2;
        let big_k1 = sk1.s1 + sk2.s1;
        let big_k2 = sk1.s2 + sk2.s2;
        let two = T::lit(2.0);
        let b1 = (two * s.gamma1()).sqrt();
        let b2 = (two * s.gamma2()).sqrt();
        let pi = T::PI();
        let d_a = s.derived_scales(k1 + k2).d_a;
        let direct = i_unit::<T>() * (big_p1 * big_k1 * b1 + big_p2 * big_k2 * b2) / pi;
        let joint = (big_p1 + big_p2) * (big_k2 * b1 + big_k1 * b2) / (d_a * (pi * s.tau_bar()));
        direct + joint
    }

    pub fn element(&self, k1: T, k2: T, p1: T, p2: T) -> Result<TwoPhotonElement<T>> {
        let mismatch = k1 + k2 - p1 - p2;
        if mismatch.abs() > T::lit(1e-9) * self.sys.gamma_bar() {
            return Err(Error::OffShell(mismatch.to_f64_lossy()));
        }
        Ok(TwoPhotonElement {
            elastic_coeff: self.transmission(p1) * self.transmission(p2),
            fluorescence_b: self.fluorescence_b(k1, k2, p1, p2),
            e_in: k1 + k2,
            e_out: p1 + p2,
        })
    }

    /// |B/τ̄|² with k_{1,2} = E/2 ± Δ_i and p_{1,2} = E/2 ± Δ_o.
    pub fn normalized_fluorescence(&self, e_total: T, delta_i: T, delta_o: T) -> T {
        let half = e_total / T::lit(2.0);
        let b = self.fluorescence_b(half + delta_i, half - delta_i, half + delta_o, half - delta_o);
        (b / re(self.sys.tau_bar())).norm_sqr()
    }
}

pub fn fluorescence_b<T: Real>(k1: T, k2: T, p1: T, p2: T, sys: &TwoAtomSystem<T>) -> Result<Cplx<T>> {
    Ok(Response::new(sys)?.fluorescence_b(k1, k2, p1, p2))
}

pub fn two_photon_element<T: Real>(k1: T, k2: T, p1: T, p2: T, sys: &TwoAtomSystem<T>) -> Result<TwoPhotonElement<T>> {
    Response::new(sys)?.element(k1, k2, p1, p2)
}

pub fn fluorescence_map<T: Real>(
    e_total: T,
    delta_i: &[T],
    delta_o: &[T],
    sys: &TwoAtomSystem<T>,
) -> Result<FluorescenceGrid<T>> {
    if delta_i.is_empty() || delta_o.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let resp = Response::new(sys)?;
    let values = delta_i
        .par_iter()
        .flat_map_iter(|&di| delta_o.iter().map(move |&d_o| resp.normalized_fluorescence(e_total, di, d_o)))
        .collect();
    Ok(FluorescenceGrid { e_total, delta_i: delta_i.to_vec(), delta_o: delta_o.to_vec(), values })
}

/// max |B/τ̄|² at E = Ω₁ + Ω₂ over (Δ_i, Δ_o) probes.
pub fn quench_residual<T: Real>(sys: &TwoAtomSystem<T>, probes: &[(T, T)]) -> Result<T> {
    let resp = Response::new(sys)?;
    let e = sys.atom1.omega + sys.atom2.omega;
    Ok(probes
        .iter()
        .map(|&(di, d_o)| resp.normalized_fluorescence(e, di, d_o))
        .fold(T::zero(), T::max))
}

/// Half the distance between the half-maximum crossings that bracket the global
/// maximum of a sampled curve, linearly interpolated. `None` if the curve does
/// not fall below half its maximum on both sides.
pub fn half_width<T: Real>(grid: &[T], values: &[T]) -> Option<T> {
    let (peak, &top) = values.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    if !(top > T::zero()) {
        return None;
    }
    let half = top / T::lit(2.0);
    let cross = |a: usize, b: usize| {
        let t = (half - values[a]) / (values[b] - values[a]);
        grid[a] + (grid[b] - grid[a]) * t
    };
    let left = (0..peak).rev().find(|&j| values[j] <= half).map(|j| cross(j, j + 1))?;
    let right = (peak + 1..values.len()).find(|&j| values[j] <= half).map(|j| cross(j - 1, j))?;
    Some((right - left) / T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AtomParams;
    use crate::single_photon::linspace;
    use proptest::prelude::*;

    fn sym(omega_d: f64) -> TwoAtomSystem<f64> {
        TwoAtomSystem::detuned(0.0, omega_d, 1.0, 1.0)
    }

    #[test]
    fn quench_on_resonance_sum() {
        let probes: Vec<_> = linspace(-5.0, 5.0, 21).into_iter().flat_map(|a| [(a, 0.3 * a - 1.0), (a, 2.0)]).collect();
        for od in [0.0, 0.5, 1.0, 3.0] {
            assert!(quench_residual(&sym(od), &probes).unwrap() <= 1e-20, "{od}");
        }
        let unequal = TwoAtomSystem::detuned(0.0, 1.0, 1.0, 2.0);
        assert!(quench_residual(&unequal, &probes).unwrap() > 1e-6);
        assert!(quench_residual(&sym(1.0).with_loss(0.1, 0.1), &probes).unwrap() > 1e-12);
    }

    #[test]
    fn zero_total_detuning_map_vanishes() {
        let d = linspace(-4.0, 4.0, 17);
        let m = fluorescence_map(0.0, &d, &d, &sym(1.0)).unwrap();
        assert!(m.max() <= 1e-20);
    }

    #[test]
    fn empty_map_grid() {
        assert_eq!(fluorescence_map(3.0, &[], &[1.0], &sym(1.0)), Err(Error::EmptyGrid));
    }

    #[test]
    fn off_shell_element_rejected() {
        let r = Response::new(&sym(1.0)).unwrap();
        assert!(matches!(r.element(1.0, 0.5, 1.0, 0.4), Err(Error::OffShell(_))));
        let e = r.element(1.0, 0.5, 1.0, 0.5).unwrap();
        assert!((e.elastic_coeff.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linewidth_narrows_with_small_splitting() {
        let grid = linspace(-10.0, 10.0, 4001);
        let cut = |od: f64| {
            let m = fluorescence_map(3.0, &[0.0], &grid, &sym(od)).unwrap();
            half_width(&grid, m.row(0)).unwrap()
        };
        let broad = cut(0.0);
        assert!((broad - 2.0).abs() < 0.3, "{broad}");
        assert!(cut(0.5) < 1.0);
    }

    #[test]
    fn half_width_of_lorentzian() {
        let g = linspace(-20.0, 20.0, 8001);
        let v: Vec<f64> = g.iter().map(|x| 1.0 / (x * x + 0.25)).collect();
        assert!((half_width(&g, &v).unwrap() - 0.5).abs() < 1e-3);
        assert_eq!(half_width(&g[..3], &v[..3]), None);
    }

    #[test]
    fn poles_of_b_follow_single_photon_poles() {
        // Along the shell p₂ = E − p₁, B diverges where p₁ approaches a pole.
        let r = Response::new(&sym(0.5)).unwrap();
        let sub = r.poles.subradiant();
        let near = r.fluorescence_b(1.0, 0.5, sub.re, 1.5 - sub.re).norm();
        let far = r.fluorescence_b(1.0, 0.5, sub.re + 3.0, 1.5 - sub.re - 3.0).norm();
        assert!(near > 10.0 * far);
    }

    fn arb_system() -> impl Strategy<Value = TwoAtomSystem<f64>> {
        (-3.0..3.0f64, -3.0..3.0f64, 0.3..3.0f64, 0.3..3.0f64)
            .prop_map(|(w1, w2, t1, t2)| TwoAtomSystem::new(AtomParams::new(w1, t1), AtomParams::new(w2, t2)))
    }

    proptest! {
        #[test]
        fn b_symmetric(sys in arb_system(), k1 in -6.0..6.0f64, k2 in -6.0..6.0f64, p1 in -6.0..6.0f64) {
            let r = Response::new(&sys).unwrap();
            let p2 = k1 + k2 - p1;
            let b = r.fluorescence_b(k1, k2, p1, p2);
            let scale = b.norm().max(1e-300);
            prop_assert!((r.fluorescence_b(k2, k1, p1, p2) - b).norm() <= 1e-12 * scale);
            prop_assert!((r.fluorescence_b(k1, k2, p2, p1) - b).norm() <= 1e-12 * scale);
        }

        #[test]
        fn b_relabel_invariant(sys in arb_system(), k1 in -6.0..6.0f64, k2 in -6.0..6.0f64, p1 in -6.0..6.0f64) {
            let p2 = k1 + k2 - p1;
            let a = fluorescence_b(k1, k2, p1, p2, &sys).unwrap();
            let b = fluorescence_b(k1, k2, p1, p2, &sys.swapped()).unwrap();
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
        }

        #[test]
        fn map_symmetric(od in 0.0..3.0f64, e in -4.0..4.0f64, di in 0.0..5.0f64, d_o in 0.0..5.0f64) {
            let r = Response::new(&sym(od)).unwrap();
            let v = r.normalized_fluorescence(e, di, d_o);
            prop_assert!(v >= 0.0);
            for (a, b) in [(-di, d_o), (di, -d_o), (-di, -d_o)] {
                prop_assert!((r.normalized_fluorescence(e, a, b) - v).abs() <= 1e-12 * v.max(1e-300));
            }
        }
    }
}
