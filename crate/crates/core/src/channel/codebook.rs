//! Limited-feedback codebooks: random-search Grassmannian packing and
//! max-min-singular-value codeword selection.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{jacobi_svd, CMatrix, ChannelRealization, Precoder};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    nt: usize,
    streams: usize,
    bits: u32,
    precoders: Vec<Precoder>,
}

#[derive(Serialize, Deserialize)]
struct CodebookFile {
    nt: usize,
    s: usize,
    bits: u32,
    precoders: Vec<Vec<[f64; 2]>>,
}

impl Codebook {
    pub fn new(bits: u32, precoders: Vec<Precoder>) -> Result<Self> {
        let first = precoders.first().ok_or_else(|| Error::invalid("codebook is empty"))?;
        let (nt, streams) = (first.nt(), first.streams());
        if precoders.iter().any(|p| p.nt() != nt || p.streams() != streams) {
            return Err(Error::Dimension("codewords must share (nt, s)".into()));
        }
        if bits >= usize::BITS || precoders.len() != 1usize << bits {
            return Err(Error::invalid(format!(
                "codebook with {bits} bits needs {} codewords, got {}",
                1u64 << bits.min(63),
                precoders.len()
            )));
        }
        Ok(Self { nt, streams, bits, precoders })
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.precoders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.precoders.is_empty()
    }

    pub fn precoders(&self) -> &[Precoder] {
        &self.precoders
    }

    /// JSON: `{nt, s, bits, precoders: [[[re, im], ...], ...]}` with each
    /// precoder flattened row-major.
    pub fn to_json(&self) -> Result<String> {
        let file = CodebookFile {
            nt: self.nt,
            s: self.streams,
            bits: self.bits,
            precoders: self
                .precoders
                .iter()
                .map(|p| {
                    let m = p.entries();
                    let mut flat = Vec::with_capacity(m.len());
                    for i in 0..m.nrows() {
                        for j in 0..m.ncols() {
                            flat.push([m[(i, j)].re, m[(i, j)].im]);
                        }
                    }
                    flat
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodebookFile = serde_json::from_str(text)?;
        let mut precoders = Vec::with_capacity(file.precoders.len());
        for (k, flat) in file.precoders.iter().enumerate() {
            if flat.len() != file.nt * file.s {
                return Err(Error::Dimension(format!(
                    "codeword {k} has {} entries, expected {}",
                    flat.len(),
                    file.nt * file.s
                )));
            }
            let m = CMatrix::from_fn(file.nt, file.s, |i, j| {
                let [re, im] = flat[i * file.s + j];
                Complex64::new(re, im)
            });
            precoders.push(Precoder::new(m)?);
        }
        Self::new(file.bits, precoders)
    }
}

/// Smallest singular value of `H·F`.
pub fn min_singular_value(h: &ChannelRealization, f: &Precoder) -> f64 {
    let hf = h.entries() * f.entries();
    *jacobi_svd(&hf).sigma.last().unwrap()
}

/// Codeword maximizing `λ_min(H·F)`; ties go to the lowest index.
pub fn select_codebook_precoder<'a>(h: &ChannelRealization, cb: &'a Codebook) -> Result<(usize, &'a Precoder)> {
    if cb.nt != h.nt() || cb.streams > h.nr() {
        return Err(Error::Dimension(format!(
            "codebook is {}x{} but channel is {}x{}",
            cb.nt,
            cb.streams,
            h.nr(),
            h.nt()
        )));
    }
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (k, f) in cb.precoders.iter().enumerate() {
        let value = min_singular_value(h, f);
        if value > best_value {
            best = k;
            best_value = value;
        }
    }
    Ok((best, &cb.precoders[best]))
}

/// Orthonormal basis for the column span (modified Gram-Schmidt).
fn orthonormal_basis(m: &CMatrix) -> CMatrix {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for k in 0..j {
            let proj: Complex64 = (0..q.nrows()).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
            for i in 0..q.nrows() {
                let qk = q[(i, k)];
                q[(i, j)] -= proj * qk;
            }
        }
        let norm = (0..q.nrows()).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] /= norm;
            }
        }
    }
    q
}

/// Chordal distance between the column spans: `‖P_a − P_b‖_F / √2`.
pub fn chordal_distance(a: &Precoder, b: &Precoder) -> f64 {
    let qa = orthonormal_basis(a.entries());
    let qb = orthonormal_basis(b.entries());
    let cross = qa.adjoint() * qb;
    let s = a.streams() as f64;
    (s - cross.norm_squared()).max(0.0).sqrt()
}

pub fn min_pairwise_distance(codewords: &[Precoder]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..codewords.len() {
        for j in (i + 1)..codewords.len() {
            best = best.min(chordal_distance(&codewords[i], &codewords[j]));
        }
    }
    best
}

fn random_codeword<R: Rng + ?Sized>(nt: usize, s: usize, rng: &mut R) -> Precoder {
    let g = CMatrix::from_fn(nt, s, |_, _| {
        Complex64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
    });
    scaled(orthonormal_basis(&g), s)
}

fn scaled(q: CMatrix, s: usize) -> Precoder {
    Precoder::new(q * Complex64::new(1.0 / (s as f64).sqrt(), 0.0)).expect("orthonormal codeword")
}

/// Result of a codebook search with its best-so-far packing history.
#[derive(Debug, Clone)]
pub struct CodebookSearch {
    pub codebook: Codebook,
    /// Minimum pairwise chordal distance after each iteration; entry 0 is
    /// the initial random set.
    pub history: Vec<f64>,
}

pub fn generate_codebook<R: Rng + ?Sized>(
    nt: usize,
    s: usize,
    bits: u32,
    iterations: usize,
    rng: &mut R,
) -> Result<Codebook> {
    Ok(generate_codebook_traced(nt, s, bits, iterations, rng)?.codebook)
}

/// Random restarts plus repulsion of the closest pair on chordal distance.
///
/// Each iteration proposes a move for one member of the currently closest
/// pair: either a fresh random subspace (restart) or a step pushing it away
/// from its neighbour. A proposal is kept only if the minimum pairwise
/// distance does not drop.
pub fn generate_codebook_traced<R: Rng + ?Sized>(
    nt: usize,
    s: usize,
    bits: u32,
    iterations: usize,
    rng: &mut R,
) -> Result<CodebookSearch> {
    if bits == 0 || bits > 16 {
        return Err(Error::invalid(format!("codebook bits must be in 1..=16, got {bits}")));
    }
    if s == 0 || s > nt {
        return Err(Error::Dimension(format!("stream count {s} outside 1..={nt}")));
    }
    let size = 1usize << bits;
    let mut words: Vec<Precoder> = (0..size).map(|_| random_codeword(nt, s, rng)).collect();
    let mut current = min_pairwise_distance(&words);
    let mut history = Vec::with_capacity(iterations + 1);
    history.push(current);
    let mut step = 0.5;

    for _ in 0..iterations {
        let (i, j) = closest_pair(&words);
        let victim = if rng.gen::<bool>() { i } else { j };
        let other = if victim == i { j } else { i };
        let proposal = if rng.gen::<f64>() < 0.2 {
            random_codeword(nt, s, rng)
        } else {
            repel(&words[victim], &words[other], step, rng)
        };
        let old = std::mem::replace(&mut words[victim], proposal);
        let candidate = min_pairwise_distance(&words);
        if candidate >= current {
            current = candidate;
        } else {
            words[victim] = old;
            step = (step * 0.97).max(1e-3);
        }
        history.push(current);
    }
    Ok(CodebookSearch { codebook: Codebook::new(bits, words)?, history })
}

fn closest_pair(words: &[Precoder]) -> (usize, usize) {
    let mut best = (0, 1.min(words.len() - 1));
    let mut best_d = f64::INFINITY;
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            let d = chordal_distance(&words[i], &words[j]);
            if d < best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Moves `a` away from the span of `b`, plus a small random jitter.
fn repel<R: Rng + ?Sized>(a: &Precoder, b: &Precoder, step: f64, rng: &mut R) -> Precoder {
    let qa = orthonormal_basis(a.entries());
    let qb = orthonormal_basis(b.entries());
    // Component of qa orthogonal to span(qb).
    let away = &qa - &qb * (qb.adjoint() * &qa);
    let jitter = CMatrix::from_fn(qa.nrows(), qa.ncols(), |_, _| {
        Complex64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
    });
    let moved = &qa + away * Complex64::new(step, 0.0) + jitter * Complex64::new(0.1 * step, 0.0);
    scaled(orthonormal_basis(&moved), qa.ncols())
}
