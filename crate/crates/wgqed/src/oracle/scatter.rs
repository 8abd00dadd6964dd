//! Gaussian wavepackets sent through the discretized model.
//!
//! Packets start half a period upstream of the atoms and are evolved for one full
//! period, so at the end they sit as far from the atoms as the periodic grid allows.

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::oracle::model::DiscreteModel;
use crate::oracle::propagate::{evolve, norm, Evolution};
use crate::C64;

/// Atomic population left after a two-photon run is dominated by states bound
/// to the band edges of the finite window, which never decay; see README.
pub const TWO_PHOTON_POPULATION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterOptions {
    /// Initial packet centre; defaults to −L/2.
    pub x0: Option<f64>,
    /// Evolution time; defaults to L.
    pub t_final: Option<f64>,
    pub population_tol: f64,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self { x0: None, t_final: None, population_tol: 1e-8 }
    }
}

impl ScatterOptions {
    pub fn two_photon() -> Self {
        Self { population_tol: TWO_PHOTON_POPULATION_TOL, ..Self::default() }
    }

    fn times(&self, model: &DiscreteModel) -> (f64, f64) {
        let l = model.period();
        (self.x0.unwrap_or(-0.5 * l), self.t_final.unwrap_or(l))
    }
}

fn check_packet(model: &DiscreteModel, k0: f64, sigma: f64) -> Result<()> {
    let gb = model.sys.gamma_bar();
    if !(sigma > 0.0) || sigma > 0.1 * gb * (1.0 + 1e-12) {
        return Err(Error::Wavepacket(format!("sigma = {sigma} must lie in (0, γ̄/10]")));
    }
    if model.period() < 6.0 / sigma {
        return Err(Error::WindowTooNarrow(format!(
            "period {:.4} shorter than 6/σ = {:.4}; add modes or narrow the window",
            model.period(),
            6.0 / sigma
        )));
    }
    if !model.inside(k0) {
        return Err(Error::Wavepacket(format!("k0 = {k0} is not inside the window margin")));
    }
    Ok(())
}

/// φ(k_j) ∝ exp(−(k_j − k0)²/(4σ²))·e^{−ik_j x0}, unit norm on the grid.
pub fn gaussian_packet(model: &DiscreteModel, k0: f64, sigma: f64, x0: f64) -> Vec<C64> {
    let mut phi: Vec<C64> = model
        .k
        .iter()
        .map(|&k| C64::from_polar((-(k - k0).powi(2) / (4.0 * sigma * sigma)).exp(), -k * x0))
        .collect();
    let n = norm(&phi);
    phi.iter_mut().for_each(|z| *z /= n);
    phi
}

fn max_loss(model: &DiscreteModel) -> f64 {
    model.sys.atom1.gamma_ng.max(model.sys.atom2.gamma_ng)
}

/// Evolves a one-excitation state given by its photon amplitudes (atoms start in
/// the ground state). Returns the full final state, photons then |e₁⟩, |e₂⟩.
pub fn evolve_single(model: &DiscreteModel, photons: &[C64], t: f64) -> (Vec<C64>, Evolution) {
    let h = model.single_hamiltonian();
    let mut psi = photons.to_vec();
    psi.extend([C64::new(0.0, 0.0); 2]);
    let ev = evolve(&h, &mut psi, t, model.spectral_bounds(false), max_loss(model));
    (psi, ev)
}

#[derive(Debug, Clone)]
pub struct SingleScatter {
    /// Grid energy nearest the requested k0; t̂ estimates t at this energy.
    pub k_probe: f64,
    pub t_hat: C64,
    pub population: f64,
    pub evolution: Evolution,
}

pub fn single_excitation_scatter(model: &DiscreteModel, k0: f64, sigma: f64) -> Result<SingleScatter> {
    single_excitation_scatter_with(model, k0, sigma, &ScatterOptions::default())
}

pub fn single_excitation_scatter_with(
    model: &DiscreteModel,
    k0: f64,
    sigma: f64,
    opts: &ScatterOptions,
) -> Result<SingleScatter> {
    check_packet(model, k0, sigma)?;
    let (x0, t) = opts.times(model);
    let phi = gaussian_packet(model, k0, sigma, x0);
    let (psi, evolution) = evolve_single(model, &phi, t);
    let n = model.n_modes;
    let population = psi[n].norm_sqr() + psi[n + 1].norm_sqr();
    if population > opts.population_tol {
        return Err(Error::NotDecayed { population, tolerance: opts.population_tol, time: t });
    }
    let j = model.nearest(k0);
    let k_probe = model.k[j];
    let t_hat = psi[j] * C64::from_polar(1.0, k_probe * t) / phi[j];
    Ok(SingleScatter { k_probe, t_hat, population, evolution })
}

/// Outcome of a two-photon run. Amplitude arrays are N×N, row-major, symmetric and
/// normalized over the full plane: Σ_ij |ψ_ij|² = 1 for the input.
#[derive(Debug, Clone)]
pub struct TwoScatter {
    pub k1: f64,
    pub k2: f64,
    pub sigma: f64,
    pub n: usize,
    pub period: f64,
    pub k: Vec<f64>,
    pub input: Vec<C64>,
    /// Chiral-mode two-photon amplitude after the run.
    pub chiral: Vec<C64>,
    /// Both photons transmitted in the waveguide: ¼[ψ_ee + (U⊗F + F⊗U + F⊗F)ψ_in],
    /// with U the interacting and F the free single-photon evolution.
    pub transmitted: Vec<C64>,
    pub population: f64,
    pub evolution: Evolution,
}

impl TwoScatter {
    pub fn spectral_density(&self) -> Vec<f64> {
        self.chiral.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Fraction of the chiral two-photon weight outside the boxes of half-width
    /// `half_box` around (k₁, k₂) and (k₂, k₁).
    pub fn off_support_weight(&self, half_box: f64) -> f64 {
        let inside = |a: f64, b: f64| (a - self.k1).abs() <= half_box && (b - self.k2).abs() <= half_box;
        let (mut off, mut total) = (0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                let w = self.chiral[i * self.n + j].norm_sqr();
                total += w;
                let (a, b) = (self.k[i], self.k[j]);
                if !inside(a, b) && !inside(b, a) {
                    off += w;
                }
            }
        }
        off / total
    }

    /// Joint-detection profile of the transmitted pair as a function of the
    /// separation x = x₁ − x₂, summed over the center of mass. Returns (x, P₂)
    /// with x ascending over [−L/2, L/2).
    pub fn relative_profile(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut grid = self.transmitted.clone();
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(n);
        for row in grid.chunks_mut(n) {
            fft.process(row);
        }
        let mut col = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = grid[r * n + c];
            }
            fft.process(&mut col);
            for r in 0..n {
                grid[r * n + c] = col[r];
            }
        }
        let dx = self.period / n as f64;
        let half = (n / 2) as isize;
        let mut xs = Vec::with_capacity(n);
        let mut p2 = Vec::with_capacity(n);
        for r in -half..(n as isize - half) {
            let s: f64 = (0..n)
                .map(|m| {
                    let a = (m as isize + r).rem_euclid(n as isize) as usize;
                    grid[a * n + m].norm_sqr()
                })
                .sum();
            xs.push(r as f64 * dx);
            p2.push(s);
        }
        (xs, p2)
    }
}

pub fn two_excitation_scatter(model: &DiscreteModel, k1: f64, k2: f64, sigma: f64) -> Result<TwoScatter> {
    two_excitation_scatter_with(model, k1, k2, sigma, &ScatterOptions::two_photon())
}

pub fn two_excitation_scatter_with(
    model: &DiscreteModel,
    k1: f64,
    k2: f64,
    sigma: f64,
    opts: &ScatterOptions,
) -> Result<TwoScatter> {
    check_packet(model, k1, sigma)?;
    check_packet(model, k2, sigma)?;
    let (x0, t) = opts.times(model);
    let n = model.n_modes;
    let f1 = gaussian_packet(model, k1, sigma, x0);
    let f2 = gaussian_packet(model, k2, sigma, x0);
    let sym = |a: &[C64], b: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = a[i] * b[j] + b[i] * a[j];
            }
        }
        out
    };
    let mut input = sym(&f1, &f2);
    let scale = norm(&input);
    input.iter_mut().for_each(|z| *z /= scale);

    let s2 = std::f64::consts::SQRT_2;
    let mut state = vec![C64::new(0.0, 0.0); model.two_dim()];
    for i in 0..n {
        for j in i..n {
            let w = if i == j { 1.0 } else { s2 };
            state[model.pair_index(i, j)] = input[i * n + j] * w;
        }
    }
    let h = model.two_hamiltonian();
    let evolution = evolve(&h, &mut state, t, model.spectral_bounds(true), max_loss(model));
    let population: f64 = state[model.pair_count()..].iter().map(|z| z.norm_sqr()).sum();
    if population > opts.population_tol {
        return Err(Error::NotDecayed { population, tolerance: opts.population_tol, time: t });
    }
    let mut chiral = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let w = if i == j { 1.0 } else { s2 };
            let v = state[model.pair_index(i, j)] / w;
            chiral[i * n + j] = v;
            chiral[j * n + i] = v;
        }
    }

    let interacting = |phi: &[C64]| evolve_single(model, phi, t).0[..n].to_vec();
    let free = |phi: &[C64]| -> Vec<C64> {
        phi.iter().zip(&model.k).map(|(z, &k)| z * C64::from_polar(1.0, -k * t)).collect()
    };
    let (u1, u2) = (interacting(&f1), interacting(&f2));
    let (g1, g2) = (free(&f1), free(&f2));
    let mut transmitted = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let uf = u1[i] * g2[j] + u2[i] * g1[j];
            let fu = g1[i] * u2[j] + g2[i] * u1[j];
            let ff = g1[i] * g2[j] + g2[i] * g1[j];
            transmitted[i * n + j] = (chiral[i * n + j] + (uf + fu + ff) / scale) * 0.25;
        }
    }
    Ok(TwoScatter {
        k1,
        k2,
        sigma,
        n,
        period: model.period(),
        k: model.k.clone(),
        input,
        chiral,
        transmitted,
        population,
        evolution,
    })
}
