//! The chiral Hamiltonian on a finite momentum grid, in the one- and
//! two-excitation sectors.
//!
//! Mode j occupies the cell [e_j, e_{j+1}] of a window of half-width R around
//! k_c and couples with strength V_n·√m_j, where m_j is the cell integral of the
//! arcsine density 1/√(1 − ((k − k_c)/R)²). That density has no Hilbert transform
//! inside the band, so truncating the continuum does not shift the resonances;
//! a flat band of the same width would. Near k_c it equals one.

use crate::error::{Error, Result};
use crate::oracle::propagate::Csr;
use crate::TwoAtomSystem;
use crate::C64;

/// Minimum distance from each resonance to the band edge, in units of γ̄.
pub const WINDOW_MARGIN: f64 = 5.0;
pub const MIN_MODES: usize = 256;

#[derive(Debug, Clone)]
pub struct DiscreteModel {
    pub sys: TwoAtomSystem,
    pub n_modes: usize,
    pub k: Vec<f64>,
    pub dk: f64,
    pub centre: f64,
    pub half_width: f64,
    pub weights: Vec<f64>,
    /// V_n·√m_j for n = 1, 2.
    pub couplings: [Vec<f64>; 2],
}

pub fn build_discrete_model(sys: &TwoAtomSystem, n_modes: usize, k_window: (f64, f64)) -> Result<DiscreteModel> {
    sys.validate()?;
    let (lo, hi) = k_window;
    if n_modes < MIN_MODES {
        return Err(Error::WindowTooNarrow(format!("n_modes = {n_modes} < {MIN_MODES}")));
    }
    if !(hi > lo) {
        return Err(Error::WindowTooNarrow(format!("empty window [{lo}, {hi}]")));
    }
    let margin = WINDOW_MARGIN * sys.gamma_bar();
    for w in [sys.atom1.omega, sys.atom2.omega] {
        if w - lo < margin || hi - w < margin {
            return Err(Error::WindowTooNarrow(format!(
                "resonance {w} closer than {WINDOW_MARGIN}γ̄ to the window edge [{lo}, {hi}]"
            )));
        }
    }
    let centre = 0.5 * (lo + hi);
    let half_width = 0.5 * (hi - lo);
    let dk = (hi - lo) / n_modes as f64;
    let edge = |j: usize| ((lo + j as f64 * dk - centre) / half_width).clamp(-1.0, 1.0).asin();
    let k = (0..n_modes).map(|j| lo + (j as f64 + 0.5) * dk).collect();
    let weights: Vec<f64> = (0..n_modes).map(|j| half_width * (edge(j + 1) - edge(j))).collect();
    let v = |tau: f64| (1.0 / (std::f64::consts::PI * tau)).sqrt();
    let couplings = [sys.atom1.tau, sys.atom2.tau].map(|tau| weights.iter().map(|m| v(tau) * m.sqrt()).collect());
    Ok(DiscreteModel { sys: *sys, n_modes, k, dk, centre, half_width, weights, couplings })
}

impl DiscreteModel {
    /// Spatial period of the grid, 2π/dk.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.dk
    }

    pub fn lossless(&self) -> bool {
        self.sys.lossless()
    }

    /// Same grid with both atoms disconnected from the waveguide and from each other.
    pub fn decoupled(&self) -> Self {
        let mut m = self.clone();
        m.couplings = [vec![0.0; self.n_modes], vec![0.0; self.n_modes]];
        m.sys.g = 0.0;
        m
    }

    fn atom_diag(&self) -> [C64; 2] {
        [self.sys.atom1.omega_eff(), self.sys.atom2.omega_eff()]
    }

    /// Nearest grid index to k.
    pub fn nearest(&self, k: f64) -> usize {
        let j = ((k - self.k[0]) / self.dk).round();
        j.clamp(0.0, (self.n_modes - 1) as f64) as usize
    }

    /// Whether k lies at least the window margin inside the band.
    pub fn inside(&self, k: f64) -> bool {
        let m = WINDOW_MARGIN * self.sys.gamma_bar();
        k - (self.centre - self.half_width) >= m && self.centre + self.half_width - k >= m
    }

    pub fn single_dim(&self) -> usize {
        self.n_modes + 2
    }

    /// N photons, then |e₁⟩, |e₂⟩.
    pub fn single_hamiltonian(&self) -> Csr {
        let n = self.n_modes;
        let d = self.atom_diag();
        let mut rows: Vec<Vec<(u32, C64)>> = (0..n)
            .map(|j| {
                vec![
                    (j as u32, C64::new(self.k[j], 0.0)),
                    (n as u32, C64::new(self.couplings[0][j], 0.0)),
                    ((n + 1) as u32, C64::new(self.couplings[1][j], 0.0)),
                ]
            })
            .collect();
        for a in 0..2 {
            let mut row: Vec<(u32, C64)> = (0..n).map(|j| (j as u32, C64::new(self.couplings[a][j], 0.0))).collect();
            row.push(((n + a) as u32, d[a]));
            row.push(((n + 1 - a) as u32, C64::new(self.sys.g, 0.0)));
            rows.push(row);
        }
        Csr::from_rows(rows)
    }

    pub fn pair_count(&self) -> usize {
        self.n_modes * (self.n_modes + 1) / 2
    }

    /// Dimension N(N+1)/2 + 2N + 1.
    pub fn two_dim(&self) -> usize {
        self.pair_count() + 2 * self.n_modes + 1
    }

    /// Index of the symmetric pair state |k_i k_j⟩, i ≤ j.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n_modes - i * i.saturating_sub(1) / 2 + (j - i)
    }

    /// Index of |k_l, e_a⟩, a ∈ {0, 1}.
    pub fn photon_atom_index(&self, a: usize, l: usize) -> usize {
        self.pair_count() + a * self.n_modes + l
    }

    pub fn doubly_excited_index(&self) -> usize {
        self.pair_count() + 2 * self.n_modes
    }

    /// Pair states |ij⟩ (amplitude √2·ψ_ij for i < j, ψ_ii on the diagonal),
    /// photon ⊗ atom states and |e₁e₂⟩.
    pub fn two_hamiltonian(&self) -> Csr {
        let n = self.n_modes;
        let d = self.atom_diag();
        let g = C64::new(self.sys.g, 0.0);
        let c = |a: usize, j: usize| C64::new(self.couplings[a][j], 0.0);
        let mut rows: Vec<Vec<(u32, C64)>> = Vec::with_capacity(self.two_dim());
        let s2 = std::f64::consts::SQRT_2;
        for i in 0..n {
            for j in i..n {
                let mut row = vec![(self.pair_index(i, j) as u32, C64::new(self.k[i] + self.k[j], 0.0))];
                for a in 0..2 {
                    if i == j {
                        row.push((self.photon_atom_index(a, i) as u32, c(a, i) * s2));
                    } else {
                        row.push((self.photon_atom_index(a, j) as u32, c(a, i)));
                        row.push((self.photon_atom_index(a, i) as u32, c(a, j)));
                    }
                }
                rows.push(row);
            }
        }
        for a in 0..2 {
            for l in 0..n {
                let mut row: Vec<(u32, C64)> = (0..n)
                    .map(|m| {
                        let w = if m == l { c(a, m) * s2 } else { c(a, m) };
                        (self.pair_index(l, m) as u32, w)
                    })
                    .collect();
                row.push((self.photon_atom_index(a, l) as u32, C64::new(self.k[l], 0.0) + d[a]));
                row.push((self.photon_atom_index(1 - a, l) as u32, g));
                row.push((self.doubly_excited_index() as u32, c(1 - a, l)));
                rows.push(row);
            }
        }
        let mut last: Vec<(u32, C64)> = Vec::with_capacity(2 * n + 1);
        for a in 0..2 {
            for l in 0..n {
                last.push((self.photon_atom_index(a, l) as u32, c(1 - a, l)));
            }
        }
        last.push((self.doubly_excited_index() as u32, d[0] + d[1]));
        rows.push(last);
        Csr::from_rows(rows)
    }

    fn coupling_norms(&self) -> [f64; 2] {
        self.couplings.clone().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Interval containing the real part of the spectrum: diagonal range widened by
    /// a bound on the coupling norm. In the two-excitation sector the photon
    /// creation operator contributes at most √2‖V_n‖.
    pub fn spectral_bounds(&self, two_excitations: bool) -> (f64, f64) {
        let [n1, n2] = self.coupling_norms();
        let d = self.atom_diag();
        let (kmin, kmax) = (self.k[0], self.k[self.n_modes - 1]);
        let mut diag: Vec<f64> = if two_excitations {
            vec![2.0 * kmin, 2.0 * kmax, kmin + d[0].re, kmax + d[0].re, kmin + d[1].re, kmax + d[1].re, d[0].re + d[1].re]
        } else {
            vec![kmin, kmax, d[0].re, d[1].re]
        };
        diag.sort_by(f64::total_cmp);
        let factor = if two_excitations { std::f64::consts::SQRT_2 } else { 1.0 };
        let off = factor * (n1 + n2) + self.sys.g.abs();
        (diag[0] - off, diag[diag.len() - 1] + off)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AtomParams;

    fn model(n: usize, g: f64) -> DiscreteModel {
        let sys = TwoAtomSystem::detuned(0.0, 1.0, 1.0, 1.5).with_g(g);
        build_discrete_model(&sys, n, (-20.0, 20.0)).unwrap()
    }

    #[test]
    fn two_sector_dimension() {
        let m = model(256, 0.0);
        assert_eq!(m.two_dim(), 256 * 257 / 2 + 512 + 1);
        assert_eq!(m.two_dim(), 33409);
        assert_eq!(m.two_hamiltonian().n, 33409);
    }

    #[test]
    fn pair_indices_are_dense() {
        let m = model(256, 0.0);
        let mut seen = vec![false; m.pair_count()];
        for i in 0..256 {
            for j in i..256 {
                let p = m.pair_index(i, j);
                assert!(!seen[p]);
                seen[p] = true;
                assert_eq!(p, m.pair_index(j, i));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn hermitian_by_construction() {
        let m = model(256, 0.3);
        assert_eq!(m.single_hamiltonian().hermiticity_defect(), 0.0);
        assert_eq!(m.two_hamiltonian().hermiticity_defect(), 0.0);
    }

    #[test]
    fn no_direct_coupling_without_g() {
        let m = model(256, 0.0);
        let n = m.n_modes;
        assert_eq!(m.single_hamiltonian().get(n, n + 1), C64::new(0.0, 0.0));
        let h = m.two_hamiltonian();
        assert_eq!(h.get(m.photon_atom_index(0, 7), m.photon_atom_index(1, 7)), C64::new(0.0, 0.0));
        let hg = model(256, 0.25).single_hamiltonian();
        assert_eq!(hg.get(n, n + 1), C64::new(0.25, 0.0));
    }

    #[test]
    fn weights_integrate_to_arcsine_total() {
        let m = model(300, 0.0);
        let total: f64 = m.weights.iter().sum();
        assert!((total - std::f64::consts::PI * 20.0).abs() < 1e-9);
        let mid = m.nearest(0.0);
        assert!((m.weights[mid] / m.dk - 1.0).abs() < 1e-3);
    }

    #[test]
    fn narrow_window_rejected() {
        let sys = TwoAtomSystem::detuned(0.0, 1.0, 1.0, 1.0);
        assert!(matches!(build_discrete_model(&sys, 256, (-5.0, 5.0)), Err(Error::WindowTooNarrow(_))));
        assert!(build_discrete_model(&sys, 128, (-20.0, 20.0)).is_err());
        let bad = TwoAtomSystem::new(AtomParams::new(0.0, -1.0), AtomParams::new(0.0, 1.0));
        assert!(build_discrete_model(&bad, 256, (-20.0, 20.0)).is_err());
    }
}
