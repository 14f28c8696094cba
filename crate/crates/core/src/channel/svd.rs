//! One-sided (Hestenes) Jacobi SVD for small dense complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::CMatrix;

/// Thin singular value decomposition `A = U·diag(σ)·V*`.
///
/// `u` is `m × k`, `v` is `n × k` with `k = min(m, n)`; `sigma` is sorted
/// descending. Each column of `v` has its largest-magnitude component real
/// and positive (lowest row index wins ties), which makes the decomposition
/// deterministic.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.sigma.len();
        let mut us = self.u.clone();
        for j in 0..k {
            let s = Complex64::new(self.sigma[j], 0.0);
            for i in 0..us.nrows() {
                us[(i, j)] *= s;
            }
        }
        us * self.v.adjoint()
    }
}

const MAX_SWEEPS: usize = 80;

pub fn jacobi_svd(a: &CMatrix) -> Svd {
    let (m, n) = a.shape();
    if m >= n {
        let (u, sigma, v) = tall_svd(a);
        finish(u, sigma, v)
    } else {
        // A* = U' Σ V'*  =>  A = V' Σ U'*
        let (u, sigma, v) = tall_svd(&a.adjoint());
        finish(v, sigma, u)
    }
}

/// Requires `m >= n`. Returns unsorted factors.
fn tall_svd(a: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let eps = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Rotate (col_p, col_q·e^{-iφ}) by a real Givens rotation.
                let pc = phase.conj();
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)] * pc;
                    w[(i, p)] = wp * c - wq * s;
                    w[(i, q)] = wp * s + wq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * pc;
                    v[(i, p)] = vp * c - vq * s;
                    v[(i, q)] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma = Vec::with_capacity(n);
    for j in 0..n {
        let norm = (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        sigma.push(norm);
        if norm > 0.0 {
            for i in 0..m {
                w[(i, j)] /= norm;
            }
        }
    }
    (w, sigma, v)
}

fn finish(u: CMatrix, sigma: Vec<f64>, v: CMatrix) -> Svd {
    let k = sigma.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));

    let mut u_sorted = CMatrix::zeros(u.nrows(), k);
    let mut v_sorted = CMatrix::zeros(v.nrows(), k);
    let mut s_sorted = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        // Fix the phase on the largest-magnitude component of v.
        let mut lead = 0;
        let mut best = -1.0;
        for i in 0..v.nrows() {
            let mag = v[(i, src)].norm();
            if mag > best * (1.0 + 1e-12) {
                best = mag;
                lead = i;
            }
        }
        let z = v[(lead, src)];
        let rot = if z.norm() > 0.0 { z.conj() / z.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..v.nrows() {
            v_sorted[(i, dst)] = v[(i, src)] * rot;
        }
        for i in 0..u.nrows() {
            u_sorted[(i, dst)] = u[(i, src)] * rot;
        }
        s_sorted.push(sigma[src]);
    }
    Svd { u: u_sorted, sigma: s_sorted, v: v_sorted }
}
