//! The transmitted two-photon wavefunction: plane-wave part plus the bound state
//! emerging from fluorescence, its joint-detection profile, beats and statistics.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CollectiveScales, TwoAtomSystem};
use crate::scalar::{i_unit, im, re, Cplx, Real};
use crate::single_photon::Response;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bunched,
    Antibunched,
    Flat,
}

impl Statistics {
    pub fn as_str(&self) -> &'static str {
        match self {
            Statistics::Bunched => "bunched",
            Statistics::Antibunched => "antibunched",
            Statistics::Flat => "flat",
        }
    }
}

/// ψ_R at (x/2, −x/2) sampled over the relative coordinate x.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateProfile<T> {
    pub k1: T,
    pub k2: T,
    pub gamma_bar: T,
    pub x: Vec<T>,
    pub psi: Vec<Cplx<T>>,
    pub p2: Vec<T>,
    pub beat_period: Option<T>,
    pub statistics: Statistics,
}

impl<T: Real> BoundStateProfile<T> {
    /// p2 scaled to unit maximum.
    pub fn normalized(&self) -> Vec<T> {
        let top = self.p2.iter().copied().fold(T::zero(), T::max);
        if top > T::zero() {
            self.p2.iter().map(|&v| v / top).collect()
        } else {
            self.p2.clone()
        }
    }
}

fn bracket<T: Real>(d: Cplx<T>, w: Cplx<T>, x: T, tol: T) -> Result<Cplx<T>> {
    let (minus, plus) = (d - w, d + w);
    if minus.norm() <= tol || plus.norm() <= tol {
        return Ok(Cplx::new(T::zero(), T::zero()));
    }
    if d.im <= tol {
        return Err(Error::GrowingExponent { which: "D", im: d.im.to_f64_lossy() });
    }
    Ok((i_unit::<T>() * d * x).exp() * minus * plus / (d * T::lit(2.0)))
}

/// F₁, F₂ at |x₁ − x₂| = `x_abs`, without the center-of-mass phase. F₁ carries
/// Ω₂ in its bracket and F₂ carries Ω₁. Exponentials whose coefficient vanishes
/// identically (identical atoms) are dropped before the decay check.
pub fn f_pair<T: Real>(x_abs: T, scales: &CollectiveScales<T>, sys: &TwoAtomSystem<T>) -> Result<(Cplx<T>, Cplx<T>)> {
    let tol = T::lit(1e-10) * sys.gamma_bar();
    if scales.d_b.norm() <= tol {
        return Err(Error::Confluent);
    }
    let half_e = scales.e_total / T::lit(2.0);
    let pref = re(T::lit(2.0).sqrt()) / (scales.d_a * scales.d_b);
    let one = |gamma: T, omega_other: Cplx<T>| -> Result<Cplx<T>> {
        let w = half_e - omega_other;
        let b = bracket(scales.d1, w, x_abs, tol)? - bracket(scales.d2, w, x_abs, tol)?;
        Ok(pref * gamma * b)
    };
    Ok((one(sys.gamma1(), sys.atom2.omega_eff())?, one(sys.gamma2(), sys.atom1.omega_eff())?))
}

/// Everything about ψ_R that depends only on the incident energies.
#[derive(Debug, Clone, Copy)]
pub struct BoundState<T> {
    pub resp: Response<T>,
    pub k1: T,
    pub k2: T,
    pub scales: CollectiveScales<T>,
    weights: [Cplx<T>; 2],
    plane: Cplx<T>,
}

impl<T: Real> BoundState<T> {
    pub fn new(k1: T, k2: T, sys: &TwoAtomSystem<T>) -> Result<Self> {
        let resp = Response::new(sys)?;
        let scales = sys.derived_scales(k1 + k2);
        let (a, b) = (resp.excitation(k1), resp.excitation(k2));
        let two = T::lit(2.0);
        let pi = T::PI();
        let k_1 = (a.s1 + b.s1) * (two * sys.gamma1()).sqrt() / pi;
        let k_2 = (a.s2 + b.s2) * (two * sys.gamma2()).sqrt() / pi;
        let i = i_unit::<T>();
        let c1 = i * sys.gamma1() / scales.d_a;
        let c2 = i * sys.gamma2() / scales.d_a;
        let one = re(T::one());
        // H = w_F1·F1 + w_F2·F2.
        let weights = [k_1 * (one - c2) - k_2 * c1, -k_1 * c2 + k_2 * (one - c1)];
        let plane = resp.waveguide(k1).0 * resp.waveguide(k2).0;
        Ok(Self { resp, k1, k2, scales, weights, plane })
    }

    /// H at relative coordinate x with the center-of-mass phase omitted.
    pub fn h_relative(&self, x: T) -> Result<Cplx<T>> {
        let (f1, f2) = f_pair(x.abs(), &self.scales, &self.resp.sys)?;
        Ok(self.weights[0] * f1 + self.weights[1] * f2)
    }

    /// ψ_R(x/2, −x/2).
    pub fn psi_relative(&self, x: T) -> Result<Cplx<T>> {
        let two = T::lit(2.0);
        let s = (self.k1 - self.k2) * x / two;
        let plane = re(s.cos() * two / (two * T::PI() * two.sqrt()));
        Ok(self.plane * plane + self.h_relative(x)? / T::lit(4.0))
    }

    pub fn h(&self, x1: T, x2: T) -> Result<Cplx<T>> {
        Ok(self.h_relative(x1 - x2)? * self.com_phase(x1, x2))
    }

    pub fn psi(&self, x1: T, x2: T) -> Result<Cplx<T>> {
        let two = T::lit(2.0);
        let s = (im(self.k1 * x1 + self.k2 * x2).exp() + im(self.k1 * x2 + self.k2 * x1).exp())
            / (two * T::PI() * two.sqrt());
        Ok(self.plane * s + self.h(x1, x2)? / T::lit(4.0))
    }

    fn com_phase(&self, x1: T, x2: T) -> Cplx<T> {
        im((self.k1 + self.k2) * (x1 + x2) / T::lit(2.0)).exp()
    }
}

pub fn bound_state_h<T: Real>(x1: T, x2: T, k1: T, k2: T, sys: &TwoAtomSystem<T>) -> Result<Cplx<T>> {
    BoundState::new(k1, k2, sys)?.h(x1, x2)
}

pub fn psi_r<T: Real>(x1: T, x2: T, k1: T, k2: T, sys: &TwoAtomSystem<T>) -> Result<Cplx<T>> {
    BoundState::new(k1, k2, sys)?.psi(x1, x2)
}

pub fn p2_profile<T: Real>(k1: T, k2: T, x_grid: &[T], sys: &TwoAtomSystem<T>) -> Result<BoundStateProfile<T>> {
    if x_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let bs = BoundState::new(k1, k2, sys)?;
    let psi = x_grid.par_iter().map(|&x| bs.psi_relative(x)).collect::<Result<Vec<_>>>()?;
    let p2 = psi.iter().map(|z| z.norm_sqr()).collect();
    let mut profile = BoundStateProfile {
        k1,
        k2,
        gamma_bar: sys.gamma_bar(),
        x: x_grid.to_vec(),
        psi,
        p2,
        beat_period: None,
        statistics: Statistics::Flat,
    };
    profile.statistics = classify_statistics(&profile)?;
    profile.beat_period = beat_period(&profile);
    Ok(profile)
}

/// Mean spacing of interior local maxima of p2 on x > 0 (vertex-refined), if at
/// least three are present.
pub fn beat_period<T: Real>(profile: &BoundStateProfile<T>) -> Option<T> {
    let (x, p) = (&profile.x, &profile.p2);
    let half = T::lit(0.5);
    let peaks: Vec<T> = (1..p.len().saturating_sub(1))
        .filter(|&j| x[j] > T::zero() && p[j] > p[j - 1] && p[j] >= p[j + 1])
        .map(|j| {
            let (a, b, c) = (p[j - 1], p[j], p[j + 1]);
            let curv = a - b - b + c;
            let shift = if curv < T::zero() { half * (a - c) / curv } else { T::zero() };
            x[j] + shift * (x[j + 1] - x[j - 1]) * half
        })
        .collect();
    if peaks.len() < 3 {
        return None;
    }
    Some((peaks[peaks.len() - 1] - peaks[0]) / T::from_usize(peaks.len() - 1)?)
}

pub fn classify_statistics<T: Real>(profile: &BoundStateProfile<T>) -> Result<Statistics> {
    let (x, p) = (&profile.x, &profile.p2);
    let reach = T::lit(2.0) / profile.gamma_bar;
    let zero = x
        .iter()
        .position(|&v| v.abs() <= T::lit(1e-9) * reach)
        .ok_or_else(|| Error::GridTooNarrow("x = 0 is not a grid point".into()))?;
    let lo = x.iter().copied().fold(T::infinity(), T::min);
    let hi = x.iter().copied().fold(T::neg_infinity(), T::max);
    if lo > -reach || hi < reach || zero == 0 || zero + 1 == x.len() {
        return Err(Error::GridTooNarrow("need at least ±2/γ̄ around x = 0".into()));
    }
    let at0 = p[zero];
    if p.iter().all(|&v| v <= at0) {
        Ok(Statistics::Bunched)
    } else if at0 < p[zero - 1] && at0 < p[zero + 1] {
        Ok(Statistics::Antibunched)
    } else {
        Ok(Statistics::Flat)
    }
}

/// Symmetric grid over ±20/min Im D (decaying scales with nonzero weight only)
/// with at least 20 samples per beat period and per plane-wave period.
pub fn auto_x_grid<T: Real>(k1: T, k2: T, sys: &TwoAtomSystem<T>) -> Vec<T> {
    let scales = sys.derived_scales(k1 + k2);
    let gb = sys.gamma_bar();
    let floor = T::lit(1e-6) * gb;
    let slowest = [scales.d1.im, scales.d2.im]
        .into_iter()
        .filter(|&v| v > floor)
        .fold(T::infinity(), T::min);
    let decay = if slowest.is_finite() { slowest.min(gb) } else { gb };
    let reach = T::lit(20.0) / decay;
    let twenty = T::lit(20.0);
    let mut step = reach / T::lit(400.0);
    if scales.d_b.re.abs() > T::lit(1e-9) * gb {
        step = step.min(T::TAU() / scales.d_b.norm() / twenty);
    }
    let dk = (k1 - k2).abs();
    if dk > T::lit(1e-9) * gb {
        step = step.min(T::TAU() * T::lit(2.0) / dk / twenty);
    }
    let n = (reach / step).ceil().to_usize().unwrap_or(400).max(1);
    let h = reach / T::from_usize(n).unwrap();
    (0..=2 * n)
        .map(|j| (T::from_usize(j).unwrap() - T::from_usize(n).unwrap()) * h)
        .collect()
}
