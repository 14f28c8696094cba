//! Kernel density estimate of the loss-visibility distribution on `[0, 1]`.
//!
//! The estimate is the usual kernel mixture truncated to `[0, 1]` and
//! renormalized by its mass `Z` on the interval. With a Gaussian kernel the
//! CDF and the partial first moment have closed forms, so queries cost one
//! pass over the window.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::{adaptive_simpson, normal_pdf, q_function, CompensatedSum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    #[default]
    Gaussian,
    Epanechnikov,
}

impl Kernel {
    fn density(self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => normal_pdf(u),
            Kernel::Epanechnikov if u.abs() < 1.0 => 0.75 * (1.0 - u * u),
            Kernel::Epanechnikov => 0.0,
        }
    }

    /// Kernel mass on `[ua, ub]`.
    fn mass(self, ua: f64, ub: f64) -> f64 {
        match self {
            Kernel::Gaussian => gaussian_mass(ua, ub),
            Kernel::Epanechnikov => {
                let cdf = |u: f64| {
                    let u = u.clamp(-1.0, 1.0);
                    0.25 * (2.0 + 3.0 * u - u * u * u)
                };
                cdf(ub) - cdf(ua)
            }
        }
    }

    /// `∫_{ua}^{ub} u K(u) du`.
    fn first_moment(self, ua: f64, ub: f64) -> f64 {
        match self {
            Kernel::Gaussian => normal_pdf(ua) - normal_pdf(ub),
            Kernel::Epanechnikov => {
                let prim = |u: f64| {
                    let u2 = u.clamp(-1.0, 1.0).powi(2);
                    0.1875 * (2.0 * u2 - u2 * u2)
                };
                prim(ub) - prim(ua)
            }
        }
    }

    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Kernel::Gaussian => rng.sample(rand_distr::StandardNormal),
            Kernel::Epanechnikov => {
                let u1: f64 = rng.gen_range(-1.0..1.0);
                let u2: f64 = rng.gen_range(-1.0..1.0);
                let u3: f64 = rng.gen_range(-1.0..1.0);
                if u3.abs() >= u2.abs() && u3.abs() >= u1.abs() {
                    u2
                } else {
                    u3
                }
            }
        }
    }
}

/// `Φ(b) − Φ(a)` evaluated on whichever tail avoids cancellation.
fn gaussian_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        q_function(a) - q_function(b)
    } else if b <= 0.0 {
        q_function(-b) - q_function(-a)
    } else {
        1.0 - q_function(-a) - q_function(b)
    }
}

/// Window and kernel settings for the running estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeParams {
    pub window: usize,
    pub bandwidth: f64,
    #[serde(default)]
    pub kernel: Kernel,
}

impl Default for KdeParams {
    fn default() -> Self {
        Self { window: 500, bandwidth: 0.05, kernel: Kernel::Gaussian }
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    samples: Vec<f64>,
    bandwidth: f64,
    kernel: Kernel,
}

/// Truncated, renormalized KDE over a window of visibilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct VisibilityDistribution {
    /// Sorted window samples; sorting makes every sum order-independent.
    samples: Vec<f64>,
    bandwidth: f64,
    kernel: Kernel,
    /// Mixture mass on `[0, 1]`, averaged over samples.
    z: f64,
}

impl TryFrom<DistributionRepr> for VisibilityDistribution {
    type Error = Error;
    fn try_from(r: DistributionRepr) -> Result<Self> {
        update_distribution(&r.samples, r.bandwidth, r.kernel)
    }
}

impl From<VisibilityDistribution> for DistributionRepr {
    fn from(d: VisibilityDistribution) -> Self {
        Self { samples: d.samples, bandwidth: d.bandwidth, kernel: d.kernel }
    }
}

/// Builds the estimate from the last `W` visibilities.
pub fn update_distribution(samples: &[f64], bandwidth: f64, kernel: Kernel) -> Result<VisibilityDistribution> {
    if samples.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::invalid(format!("bandwidth {bandwidth} must be positive")));
    }
    if let Some(v) = samples.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::invalid(format!("visibility {v} outside [0, 1]")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut dist = VisibilityDistribution { samples: sorted, bandwidth, kernel, z: 1.0 };
    dist.z = dist.raw_mass(0.0, 1.0);
    Ok(dist)
}

impl VisibilityDistribution {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn window_len(&self) -> usize {
        self.samples.len()
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// Untruncated mixture mass on `[0, 1]`.
    pub fn normalization(&self) -> f64 {
        self.z
    }

    /// Mean over samples of the kernel mass on `[a, b]`, before renormalizing.
    fn raw_mass(&self, a: f64, b: f64) -> f64 {
        let h = self.bandwidth;
        let sum: CompensatedSum = self.samples.iter().map(|&v| self.kernel.mass((a - v) / h, (b - v) / h)).collect();
        sum.value() / self.samples.len() as f64
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let h = self.bandwidth;
        let sum: CompensatedSum = self.samples.iter().map(|&v| self.kernel.density((x - v) / h)).collect();
        sum.value() / (self.samples.len() as f64 * h * self.z)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        (self.raw_mass(0.0, x) / self.z).clamp(0.0, 1.0)
    }

    /// Inverse CDF by safeguarded Newton iteration inside a bisection bracket.
    pub fn quantile(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        if q >= 1.0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut x = q;
        for _ in 0..200 {
            let err = self.cdf(x) - q;
            if err.abs() <= 1e-15 {
                return x;
            }
            if err < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 1e-16 {
                break;
            }
            let density = self.pdf(x);
            let newton = x - err / density;
            x = if density > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        x
    }

    /// `∫_a^b v f(v) dv`.
    pub fn partial_moment(&self, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::invalid(format!("partial moment bounds reversed: {a} > {b}")));
        }
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        let h = self.bandwidth;
        let sum: CompensatedSum = self
            .samples
            .iter()
            .map(|&v| {
                let (ua, ub) = ((a - v) / h, (b - v) / h);
                v * self.kernel.mass(ua, ub) + h * self.kernel.first_moment(ua, ub)
            })
            .collect();
        Ok(sum.value() / (self.samples.len() as f64 * self.z))
    }

    /// `E[v]`; identical to `partial_moment(0, 1)`.
    pub fn mean(&self) -> f64 {
        self.partial_moment(0.0, 1.0).expect("ordered bounds")
    }

    /// Numerical `∫_a^b g(x) f(x) dx`; panels narrower than the bandwidth
    /// keep the adaptive rule from stepping over narrow peaks.
    fn quadrature<G: Fn(f64) -> f64>(&self, g: G, a: f64, b: f64, tol: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let panels = (((b - a) / (0.25 * self.bandwidth)).ceil() as usize).max(1);
        let width = (b - a) / panels as f64;
        let f = |x: f64| g(x) * self.pdf(x);
        (0..panels)
            .map(|k| {
                let lo = a + k as f64 * width;
                adaptive_simpson(&f, lo, if k + 1 == panels { b } else { lo + width }, tol / panels as f64)
            })
            .collect::<CompensatedSum>()
            .value()
    }

    /// Quadrature cross-check for [`cdf`](Self::cdf).
    pub fn cdf_by_quadrature(&self, x: f64) -> f64 {
        self.quadrature(|_| 1.0, 0.0, x.clamp(0.0, 1.0), 1e-12)
    }

    /// Quadrature cross-check for [`partial_moment`](Self::partial_moment).
    pub fn partial_moment_by_quadrature(&self, a: f64, b: f64) -> f64 {
        self.quadrature(|x| x, a.clamp(0.0, 1.0), b.clamp(0.0, 1.0), 1e-12)
    }

    /// Draws from the truncated mixture by rejecting kernel draws outside `[0, 1]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let centre = self.samples[rng.gen_range(0..self.samples.len())];
            let x = centre + self.bandwidth * self.kernel.draw(rng);
            if (0.0..=1.0).contains(&x) {
                return x;
            }
        }
    }
}

/// Sliding window over the most recent packets.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityWindow {
    capacity: usize,
    entries: VecDeque<(f64, u32)>,
}

impl VisibilityWindow {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::invalid("window capacity must be >= 1"));
        }
        Ok(Self { capacity, entries: VecDeque::with_capacity(capacity) })
    }

    pub fn push(&mut self, visibility: f64, size_symbols: u32) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((visibility, size_symbols));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn visibilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn mean_size(&self) -> Result<f64> {
        if self.entries.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(self.entries.iter().map(|e| e.1 as f64).sum::<f64>() / self.entries.len() as f64)
    }

    pub fn distribution(&self, bandwidth: f64, kernel: Kernel) -> Result<VisibilityDistribution> {
        update_distribution(&self.visibilities(), bandwidth, kernel)
    }
}
