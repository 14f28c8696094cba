//! MIMO channel sampling, precoding and zero-forcing post-processing SNR.

mod codebook;
mod svd;

pub use codebook::{
    chordal_distance, generate_codebook, generate_codebook_traced, min_pairwise_distance, select_codebook_precoder,
    Codebook, CodebookSearch,
};
pub use svd::{jacobi_svd, Svd};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Condition number of `H·F` above which zero-forcing is refused.
pub const CONDITION_CAP: f64 = 1e12;

/// One `nr × nt` sample of the channel matrix `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    entries: CMatrix,
}

impl ChannelRealization {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::Dimension("channel must be at least 1x1".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("channel entries must be finite"));
        }
        Ok(Self { entries })
    }

    /// Real diagonal channel, `nr = nt = diag.len()`.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(CMatrix::from_fn(
            n,
            n,
            |i, j| {
                if i == j {
                    Complex64::new(diag[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
        ))
    }

    pub fn nr(&self) -> usize {
        self.entries.nrows()
    }

    pub fn nt(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn max_streams(&self) -> usize {
        self.nr().min(self.nt())
    }

    pub fn to_json_rows(&self) -> Vec<Vec<[f64; 2]>> {
        matrix_to_rows(&self.entries)
    }

    pub fn from_json_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        Self::new(rows_to_matrix(rows)?)
    }
}

/// I.i.d. `CN(0, 1)` entries: real and imaginary parts each have variance 1/2.
pub fn sample_rayleigh<R: Rng + ?Sized>(nr: usize, nt: usize, rng: &mut R) -> ChannelRealization {
    assert!(nr >= 1 && nt >= 1, "channel dimensions must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut draw = || -> f64 { StandardNormal.sample(&mut *rng) };
    // Column-major fill order is part of the reproducibility contract.
    let entries = CMatrix::from_fn(nr, nt, |_, _| Complex64::new(draw() * scale, draw() * scale));
    ChannelRealization { entries }
}

pub fn svd_decompose(h: &ChannelRealization) -> Svd {
    jacobi_svd(h.entries())
}

/// `nt × s` linear precoder with mutually orthogonal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    entries: CMatrix,
}

impl Precoder {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.ncols() == 0 || entries.nrows() < entries.ncols() {
            return Err(Error::Dimension(format!(
                "precoder must be nt x s with 1 <= s <= nt, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("precoder entries must be finite"));
        }
        Ok(Self { entries })
    }

    pub fn nt(&self) -> usize {
        self.entries.nrows()
    }

    pub fn streams(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// `‖F*F − I/S‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let s = self.streams();
        let gram = self.entries.adjoint() * &self.entries;
        let target = CMatrix::identity(s, s) * Complex64::new(1.0 / s as f64, 0.0);
        (gram - target).norm()
    }

    pub fn to_json_rows(&self) -> Vec<Vec<[f64; 2]>> {
        matrix_to_rows(&self.entries)
    }

    pub fn from_json_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        Self::new(rows_to_matrix(rows)?)
    }
}

/// `F = V[:, 1..s] / √s`.
pub fn unitary_precoder(h: &ChannelRealization, s: usize) -> Result<Precoder> {
    let svd = svd_decompose(h);
    precoder_from_svd(&svd, s)
}

pub fn precoder_from_svd(svd: &Svd, s: usize) -> Result<Precoder> {
    let k = svd.sigma.len();
    if s == 0 || s > k {
        return Err(Error::Dimension(format!("stream count {s} outside 1..={k}")));
    }
    let scale = Complex64::new(1.0 / (s as f64).sqrt(), 0.0);
    let cols = svd.v.columns(0, s).into_owned() * scale;
    Precoder::new(cols)
}

/// Per-stream post-processing SNRs, linear scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrVector(Vec<f64>);

impl SnrVector {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if gammas.iter().any(|g| g.is_nan() || *g < 0.0) {
            return Err(Error::invalid("SNRs must be non-negative"));
        }
        Ok(Self(gammas))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Zero-forcing SNR on each stream: `γ_i = (Es/N0) / [(F*H*HF)^{-1}]_{ii}`.
pub fn zf_post_snr(h: &ChannelRealization, f: &Precoder, es_over_n0: f64) -> Result<SnrVector> {
    if f.nt() != h.nt() {
        return Err(Error::Dimension(format!(
            "precoder has {} rows but channel has {} transmit antennas",
            f.nt(),
            h.nt()
        )));
    }
    let s = f.streams();
    if s > h.nr() {
        return Err(Error::Dimension(format!("{s} streams exceed {} receive antennas", h.nr())));
    }
    let hf = h.entries() * f.entries();
    let svd = jacobi_svd(&hf);
    let smax = svd.sigma[0];
    let smin = *svd.sigma.last().unwrap();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= CONDITION_CAP) {
        // The stream carrying most of the weakest right singular vector collapses.
        let weakest = svd.v.column(s - 1);
        let stream =
            (0..s).max_by(|&a, &b| weakest[a].norm().total_cmp(&weakest[b].norm()).then(b.cmp(&a))).unwrap_or(0);
        return Err(Error::Singular { stream, condition });
    }
    let gram = hf.adjoint() * &hf;
    let inv = gram.try_inverse().ok_or(Error::Singular { stream: s - 1, condition })?;
    let gammas = (0..s).map(|i| (es_over_n0 / inv[(i, i)].re).max(0.0)).collect();
    Ok(SnrVector(gammas))
}

/// SVD-precoder shortcut: `γ_i = (Es/N0)·σ_i²/S` for the top `s` singular values.
pub fn svd_post_snr(sigma: &[f64], s: usize, es_over_n0: f64) -> Result<SnrVector> {
    if s == 0 || s > sigma.len() {
        return Err(Error::Dimension(format!("stream count {s} outside 1..={}", sigma.len())));
    }
    let gammas = sigma[..s].iter().map(|x| es_over_n0 * x * x / s as f64).collect();
    Ok(SnrVector(gammas))
}

pub(crate) fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub(crate) fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Dimension("matrix rows must be non-empty and equal length".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}
