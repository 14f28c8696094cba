//! Stream ordering, load-balancing thresholds and weighted throughput.

use serde::{Deserialize, Serialize};

use crate::link::{baseline_per, StreamLink};
use crate::math::CompensatedSum;
use crate::visibility::{PacketRecord, VisibilityDistribution};
use crate::{Error, Result};

/// Relative margin by which a stream's time must exceed the current
/// maximum to become the bottleneck.
pub const BOTTLENECK_TOLERANCE: f64 = 1e-12;

/// Threshold vector `[v̂_1 = 0, v̂_2, ..., v̂_{S+1} = 1]`.
///
/// Class `i` holds visibilities in `[v̂_i, v̂_{i+1})`; the last class also
/// holds `v = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ThresholdPolicy {
    v_hat: Vec<f64>,
}

impl ThresholdPolicy {
    pub fn new(v_hat: Vec<f64>) -> Result<Self> {
        if v_hat.len() < 2 {
            return Err(Error::invalid("a threshold vector needs at least two entries"));
        }
        if v_hat[0] != 0.0 || *v_hat.last().unwrap() != 1.0 {
            return Err(Error::invalid("thresholds must start at 0 and end at 1"));
        }
        if v_hat.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::invalid(format!("thresholds must be non-decreasing: {v_hat:?}")));
        }
        Ok(Self { v_hat })
    }

    /// Builds `[0, inner..., 1]`.
    pub fn from_inner(inner: &[f64]) -> Result<Self> {
        let mut v = Vec::with_capacity(inner.len() + 2);
        v.push(0.0);
        v.extend_from_slice(inner);
        v.push(1.0);
        Self::new(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.v_hat
    }

    pub fn classes(&self) -> usize {
        self.v_hat.len() - 1
    }

    /// Zero-based class of a visibility under the closed-above convention.
    pub fn class_of(&self, v: f64) -> usize {
        let s = self.classes();
        // Largest i < S with v >= v̂_i; v̂_1 = 0 guarantees a match for v >= 0.
        (0..s).rev().find(|&i| v >= self.v_hat[i]).unwrap_or(0)
    }

    /// `F(v̂_{i+1}) − F(v̂_i)` per class.
    pub fn class_masses(&self, dist: &VisibilityDistribution) -> Vec<f64> {
        let cdf: Vec<f64> = self.v_hat.iter().map(|&v| dist.cdf(v)).collect();
        cdf.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `∫_{v̂_i}^{v̂_{i+1}} v f(v) dv` per class.
    pub fn class_moments(&self, dist: &VisibilityDistribution) -> Vec<f64> {
        self.v_hat.windows(2).map(|w| dist.partial_moment(w[0], w[1]).expect("sorted thresholds")).collect()
    }
}

impl TryFrom<Vec<f64>> for ThresholdPolicy {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ThresholdPolicy::new(v)
    }
}

impl From<ThresholdPolicy> for Vec<f64> {
    fn from(t: ThresholdPolicy) -> Vec<f64> {
        t.v_hat
    }
}

/// Permutation listing streams by non-decreasing delivery probability;
/// stable, so equal streams keep their original order.
pub fn order_streams(links: &[StreamLink]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..links.len()).collect();
    idx.sort_by(|&a, &b| links[a].p_success.total_cmp(&links[b].p_success));
    idx
}

pub fn apply_order(links: &[StreamLink], order: &[usize]) -> Vec<StreamLink> {
    order.iter().map(|&i| links[i].clone()).collect()
}

fn common_code_rate(links: &[StreamLink]) -> f64 {
    links[0].code.value()
}

fn check_links(links: &[StreamLink], thresholds: Option<&ThresholdPolicy>) -> Result<()> {
    if links.is_empty() {
        return Err(Error::invalid("at least one stream is required"));
    }
    if let Some(t) = thresholds {
        if t.classes() != links.len() {
            return Err(Error::Dimension(format!("{} classes for {} streams", t.classes(), links.len())));
        }
    }
    Ok(())
}

/// Load-balancing thresholds: class `i` receives probability mass in
/// proportion to the stream's goodput `R_i / r_i`.
pub fn optimal_thresholds(dist: &VisibilityDistribution, ordered: &[StreamLink]) -> Result<ThresholdPolicy> {
    check_links(ordered, None)?;
    let weights: Vec<f64> = ordered.iter().map(StreamLink::goodput).collect();
    let total: f64 = weights.iter().copied().collect::<CompensatedSum>().value();
    if !(total > 0.0) {
        return Err(Error::invalid("streams carry no goodput"));
    }
    let mut v_hat = Vec::with_capacity(ordered.len() + 1);
    v_hat.push(0.0);
    let mut cum = CompensatedSum::new();
    for w in &weights[..weights.len() - 1] {
        cum.add(*w);
        let x = dist.quantile(cum.value() / total);
        // Guard against a quantile landing a hair below its predecessor.
        v_hat.push(x.max(*v_hat.last().unwrap()));
    }
    v_hat.push(1.0);
    ThresholdPolicy::new(v_hat)
}

/// Expected per-stream transmission times `E[b]·ΔF_i·r_i/(C·R_i)`.
pub fn transmission_times(
    thresholds: &ThresholdPolicy,
    ordered: &[StreamLink],
    dist: &VisibilityDistribution,
    mean_b: f64,
) -> Result<Vec<f64>> {
    check_links(ordered, Some(thresholds))?;
    let c = common_code_rate(ordered);
    Ok(thresholds.class_masses(dist).iter().zip(ordered).map(|(df, l)| mean_b * df * l.r / (c * l.rate)).collect())
}

/// Index of the largest entry; a later entry only wins by a relative margin.
pub fn bottleneck(times: &[f64]) -> usize {
    let mut best = 0;
    for (i, &t) in times.iter().enumerate().skip(1) {
        if t > times[best] * (1.0 + BOTTLENECK_TOLERANCE) {
            best = i;
        }
    }
    best
}

/// `C·R·(1 − α)·quality / E[b]`, the common shape of both objectives.
fn throughput_times_quality(c: f64, rate: f64, one_minus_alpha: f64, quality: f64, mean_b: f64) -> f64 {
    c * rate * one_minus_alpha * quality / mean_b
}

/// Weighted throughput of the prioritized policy at arbitrary thresholds:
/// delivered visibility per unit time, with time set by the bottleneck stream.
pub fn weighted_throughput_prioritized(
    thresholds: &ThresholdPolicy,
    ordered: &[StreamLink],
    dist: &VisibilityDistribution,
    mean_b: f64,
) -> Result<f64> {
    let times = transmission_times(thresholds, ordered, dist, mean_b)?;
    let k = bottleneck(&times);
    let masses = thresholds.class_masses(dist);
    let moments = thresholds.class_moments(dist);
    let pk = ordered[k].p_success;
    let quality: f64 =
        ordered.iter().zip(&moments).map(|(l, m)| l.p_success / pk * m).collect::<CompensatedSum>().value();
    let c = common_code_rate(ordered);
    Ok(throughput_times_quality(c, ordered[k].rate, 1.0 - ordered[k].alpha, quality / masses[k], mean_b))
}

/// Closed form valid at the load-balancing thresholds: post-retransmission
/// sum throughput times loss-penalized quality.
pub fn weighted_throughput_load_balanced(
    thresholds: &ThresholdPolicy,
    ordered: &[StreamLink],
    dist: &VisibilityDistribution,
    mean_b: f64,
) -> Result<f64> {
    check_links(ordered, Some(thresholds))?;
    let c = common_code_rate(ordered);
    let throughput: f64 = ordered.iter().map(StreamLink::goodput).collect::<CompensatedSum>().value();
    let quality = delivered_quality(thresholds, ordered, dist)?;
    Ok(c / mean_b * throughput * quality)
}

/// `Σ p_i ∫_{class i} v f(v) dv`.
pub fn delivered_quality(
    thresholds: &ThresholdPolicy,
    ordered: &[StreamLink],
    dist: &VisibilityDistribution,
) -> Result<f64> {
    check_links(ordered, Some(thresholds))?;
    Ok(thresholds
        .class_moments(dist)
        .iter()
        .zip(ordered)
        .map(|(m, l)| l.p_success * m)
        .collect::<CompensatedSum>()
        .value())
}

/// Baseline weighted throughput when every packet is spread over all
/// streams: `E[v]·C·S·(1 − α_b)·min_i R_i / E[b]`.
pub fn weighted_throughput_baseline(links: &[StreamLink], dist: &VisibilityDistribution, mean_b: f64) -> Result<f64> {
    check_links(links, None)?;
    let alphas: Vec<f64> = links.iter().map(|l| l.alpha).collect();
    let alpha_b = baseline_per(&alphas);
    let min_rate = links.iter().map(|l| l.rate).fold(f64::INFINITY, f64::min);
    let c = common_code_rate(links);
    Ok(throughput_times_quality(c, links.len() as f64 * min_rate, 1.0 - alpha_b, dist.mean(), mean_b))
}

/// Weighted throughput of an explicit packet-to-stream mapping:
/// `Σ_i p_i Σ_{p∈V_i} v_p / max_i t_i` with `t_i = Σ_{p∈V_i} b_p r_i/(C R_i)`.
///
/// `mapping[i]` lists packet indices carried by `links[i]`; empty streams
/// contribute zero time.
pub fn evaluate_mapping_wt(mapping: &[Vec<usize>], links: &[StreamLink], packets: &[PacketRecord]) -> Result<f64> {
    check_links(links, None)?;
    if mapping.len() != links.len() {
        return Err(Error::Dimension(format!("{} packet sets for {} streams", mapping.len(), links.len())));
    }
    let mut seen = vec![false; packets.len()];
    for &p in mapping.iter().flatten() {
        match seen.get_mut(p) {
            None => return Err(Error::NonPartition(format!("packet index {p} out of range"))),
            Some(true) => return Err(Error::NonPartition(format!("packet {p} mapped twice"))),
            Some(s) => *s = true,
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::NonPartition(format!("packet {missing} is not mapped")));
    }
    let c = common_code_rate(links);
    let mut value = CompensatedSum::new();
    let mut t_max = 0.0f64;
    for (set, link) in mapping.iter().zip(links) {
        let v: f64 = set.iter().map(|&p| packets[p].visibility).collect::<CompensatedSum>().value();
        let b: f64 = set.iter().map(|&p| packets[p].size_symbols as f64).sum();
        value.add(link.p_success * v);
        t_max = t_max.max(b * link.r / (c * link.rate));
    }
    if t_max == 0.0 {
        return Ok(0.0);
    }
    Ok(value.value() / t_max)
}

/// Splits packets into per-class index lists under `thresholds`.
pub fn classify_packets(thresholds: &ThresholdPolicy, packets: &[PacketRecord]) -> Vec<Vec<usize>> {
    let mut classes = vec![Vec::new(); thresholds.classes()];
    for (i, p) in packets.iter().enumerate() {
        classes[thresholds.class_of(p.visibility)].push(i);
    }
    classes
}
