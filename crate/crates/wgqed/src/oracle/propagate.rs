//! Sparse matrices and time evolution e^{−iHt}ψ.
//!
//! Hermitian generators use a Chebyshev expansion over time slices; its
//! truncation error is set by Bessel-function decay and does not accumulate with
//! step size. Non-Hermitian generators (non-guided loss) fall back to Taylor steps.

use rayon::prelude::*;

use crate::C64;

const ROW_CHUNK: usize = 2048;
/// Largest Chebyshev argument a·dt per slice.
const SLICE_ARGUMENT: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<C64>,
}

impl Csr {
    /// Rows of (column, value); duplicate columns are summed, zeros dropped.
    pub fn from_rows(rows: Vec<Vec<(u32, C64)>>) -> Self {
        let n = rows.len();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<u32> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            indptr.push(indices.len());
        }
        let mut m = Self { n, indptr, indices, values };
        m.drop_zeros();
        m
    }

    fn drop_zeros(&mut self) {
        let mut indptr = vec![0];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.n {
            for p in self.indptr[r]..self.indptr[r + 1] {
                if self.values[p] != C64::new(0.0, 0.0) {
                    indices.push(self.indices[p]);
                    values.push(self.values[p]);
                }
            }
            indptr.push(indices.len());
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&(c as u32)) {
            Ok(p) => self.values[span.start + p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    fn row_dot(&self, r: usize, x: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for p in self.indptr[r]..self.indptr[r + 1] {
            acc += self.values[p] * x[self.indices[p] as usize];
        }
        acc
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        y.par_chunks_mut(ROW_CHUNK).enumerate().for_each(|(b, chunk)| {
            let base = b * ROW_CHUNK;
            for (o, out) in chunk.iter_mut().enumerate() {
                *out = self.row_dot(base + o, x);
            }
        });
    }

    /// max |H_ij − conj(H_ji)| over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        (0..self.n)
            .into_par_iter()
            .map(|r| {
                (self.indptr[r]..self.indptr[r + 1])
                    .map(|p| (self.values[p] - self.get(self.indices[p] as usize, r).conj()).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// ⟨x|H|x⟩.
    pub fn expectation(&self, x: &[C64]) -> C64 {
        let mut hx = vec![C64::new(0.0, 0.0); self.n];
        self.matvec(x, &mut hx);
        dot(x, &hx)
    }
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Diagnostics of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    pub time: f64,
    pub matvecs: usize,
    /// |‖ψ(t)‖ − ‖ψ(0)‖|.
    pub norm_drift: f64,
    /// |⟨H⟩_t − ⟨H⟩_0| / max(|⟨H⟩_0|, spectral half-width).
    pub energy_drift: f64,
}

/// J_0(z), …, J_{n_max}(z) by Miller's backward recurrence, normalized with
/// J_0 + 2ΣJ_{2k} = 1.
pub fn bessel_j_sequence(z: f64, n_max: usize) -> Vec<f64> {
    if z == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return v;
    }
    let start = n_max + 40 + (z.abs().sqrt() as usize) * 4;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / z * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let sum = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    vals.truncate(n_max + 1);
    vals.iter_mut().for_each(|v| *v /= sum);
    vals
}

fn chebyshev_slice(h: &Csr, psi: &mut [C64], centre: f64, half: f64, dt: f64) -> usize {
    let z = half * dt;
    let guess = (z.abs() + 12.0 * z.abs().cbrt() + 30.0) as usize;
    let j = bessel_j_sequence(z, guess);
    let last = j.iter().rposition(|v| v.abs() > 1e-18).unwrap_or(0).max(1);
    let coef = |n: usize| -> C64 {
        let phase = match n % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        phase * j[n] * if n == 0 { 1.0 } else { 2.0 }
    };
    let n = h.n;
    let zero = C64::new(0.0, 0.0);
    let mut prev = psi.to_vec();
    let mut cur = vec![zero; n];
    // T_1 ψ = (H − c)ψ/a.
    h.matvec(&prev, &mut cur);
    cur.par_iter_mut().zip(prev.par_iter()).for_each(|(y, x)| *y = (*y - x * centre) / half);
    let (c0, c1) = (coef(0), coef(1));
    let mut acc: Vec<C64> = prev.iter().zip(&cur).map(|(a, b)| a * c0 + b * c1).collect();
    let mut matvecs = 1;
    for k in 2..=last {
        let ck = coef(k);
        // prev ← 2(H − c)cur/a − prev, then acc += c_k·prev.
        prev.par_chunks_mut(ROW_CHUNK).zip(acc.par_chunks_mut(ROW_CHUNK)).enumerate().for_each(|(b, (pc, ac))| {
            let base = b * ROW_CHUNK;
            for o in 0..pc.len() {
                let r = base + o;
                let y = (h.row_dot(r, &cur) - cur[r] * centre) * (2.0 / half) - pc[o];
                pc[o] = y;
                ac[o] += ck * y;
            }
        });
        std::mem::swap(&mut prev, &mut cur);
        matvecs += 1;
    }
    let rot = C64::from_polar(1.0, -centre * dt);
    psi.par_iter_mut().zip(acc.par_iter()).for_each(|(p, a)| *p = a * rot);
    matvecs
}

fn taylor_step(h: &Csr, psi: &mut [C64], centre: f64, dt: f64) -> usize {
    let n = h.n;
    let mut term = psi.to_vec();
    let mut next = vec![C64::new(0.0, 0.0); n];
    let scale = norm(psi).max(1e-300);
    let mut matvecs = 0;
    for k in 1..80 {
        h.matvec(&term, &mut next);
        let f = C64::new(0.0, -dt / k as f64);
        next.par_iter_mut().zip(term.par_iter()).for_each(|(y, x)| *y = (*y - x * centre) * f);
        std::mem::swap(&mut term, &mut next);
        psi.par_iter_mut().zip(term.par_iter()).for_each(|(p, t)| *p += t);
        matvecs += 1;
        if norm(&term) < 1e-17 * scale {
            break;
        }
    }
    let rot = C64::from_polar(1.0, -centre * dt);
    psi.par_iter_mut().for_each(|p| *p *= rot);
    matvecs
}

/// ψ ← e^{−iHt}ψ. `bounds` must contain the real part of the spectrum; `max_loss`
/// bounds the anti-Hermitian part (zero for a Hermitian generator).
pub fn evolve(h: &Csr, psi: &mut [C64], t: f64, bounds: (f64, f64), max_loss: f64) -> Evolution {
    let centre = 0.5 * (bounds.0 + bounds.1);
    let half = 0.5 * (bounds.1 - bounds.0) * 1.01 + 1e-12;
    let norm0 = norm(psi);
    let e0 = h.expectation(psi).re;
    let mut matvecs = 2;
    if t != 0.0 {
        if max_loss == 0.0 {
            let slices = (half * t.abs() / SLICE_ARGUMENT).ceil().max(1.0) as usize;
            let dt = t / slices as f64;
            for _ in 0..slices {
                matvecs += chebyshev_slice(h, psi, centre, half, dt);
            }
        } else {
            let radius = half + max_loss;
            let steps = (radius * t.abs() / 0.5).ceil().max(1.0) as usize;
            let dt = t / steps as f64;
            for _ in 0..steps {
                matvecs += taylor_step(h, psi, centre, dt);
            }
        }
    }
    let e1 = h.expectation(psi).re;
    Evolution {
        time: t,
        matvecs,
        norm_drift: (norm(psi) - norm0).abs(),
        energy_drift: (e1 - e0).abs() / e0.abs().max(half),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level(delta: f64, omega: f64) -> Csr {
        Csr::from_rows(vec![
            vec![(0, C64::new(delta, 0.0)), (1, C64::new(omega, 0.0))],
            vec![(0, C64::new(omega, 0.0)), (1, C64::new(-delta, 0.0))],
        ])
    }

    #[test]
    fn bessel_values() {
        let j = bessel_j_sequence(1.0, 3);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        let big = bessel_j_sequence(200.0, 260);
        assert!((big[0] + 0.015_437_439_930_565_088).abs() < 1e-14);
        assert!((big[150] + 0.031_593_559_273_457_76).abs() < 1e-14);
        assert!((big[260] - 1.683_848_978_220_517_5e-15).abs() < 1e-20);
    }

    #[test]
    fn rabi_oscillation_matches_closed_form() {
        let (d, w) = (0.3, 1.1);
        let h = two_level(d, w);
        let t = 37.0;
        let mut psi = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let ev = evolve(&h, &mut psi, t, (-2.0, 2.0), 0.0);
        let r = (d * d + w * w).sqrt();
        let p1 = (w / r * (r * t).sin()).powi(2);
        assert!((psi[1].norm_sqr() - p1).abs() < 1e-12);
        assert!(ev.norm_drift < 1e-12 && ev.energy_drift < 1e-12);
    }

    #[test]
    fn taylor_agrees_with_chebyshev() {
        let h = two_level(0.4, 0.9);
        let mut a = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let mut b = a.clone();
        evolve(&h, &mut a, 12.0, (-1.0, 1.0), 0.0);
        evolve(&h, &mut b, 12.0, (-1.0, 1.0), 1e-9);
        assert!((a[0] - b[0]).norm() + (a[1] - b[1]).norm() < 1e-12);
    }

    #[test]
    fn lossy_generator_decays() {
        let h = Csr::from_rows(vec![vec![(0, C64::new(0.5, -0.1))]]);
        let mut psi = vec![C64::new(1.0, 0.0)];
        evolve(&h, &mut psi, 3.0, (0.4, 0.6), 0.1);
        assert!((psi[0] - C64::new(0.0, -1.5).exp() * (-0.3f64).exp()).norm() < 1e-13);
    }

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let m = Csr::from_rows(vec![vec![(1, C64::new(1.0, 0.0)), (1, C64::new(2.0, 0.0)), (0, C64::new(0.0, 0.0))], vec![]]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), C64::new(3.0, 0.0));
    }
}
