//! Per-mode planning and mode selection for one channel realization.

use serde::{Deserialize, Serialize};

use super::mcs::select_mcs;
use super::thresholds::{
    apply_order, optimal_thresholds, order_streams, weighted_throughput_prioritized, ThresholdPolicy,
};
use crate::channel::{
    precoder_from_svd, select_codebook_precoder, svd_decompose, svd_post_snr, zf_post_snr, ChannelRealization,
    Codebook, Precoder,
};
use crate::link::{CodeRate, LinkConfig, Modulation, StreamLink};
use crate::math::linear_to_db;
use crate::visibility::VisibilityDistribution;
use crate::{Error, Result};

/// Where the transmitter's precoder comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum PrecoderSource {
    /// Full channel knowledge: right singular vectors of `H`.
    Svd,
    /// Limited feedback: one codebook per stream count.
    Codebooks(Vec<Codebook>),
}

impl PrecoderSource {
    fn codebook_for(&self, nt: usize, s: usize) -> Option<&Codebook> {
        match self {
            PrecoderSource::Svd => None,
            PrecoderSource::Codebooks(books) => books.iter().find(|c| c.streams() == s && c.nt() == nt),
        }
    }

    fn supports(&self, nt: usize, s: usize) -> bool {
        matches!(self, PrecoderSource::Svd) || self.codebook_for(nt, s).is_some()
    }
}

/// Precoder, selected codeword (if any) and per-stream SNRs for `s` streams.
pub fn stream_snrs(
    h: &ChannelRealization,
    s: usize,
    es_over_n0: f64,
    source: &PrecoderSource,
) -> Result<(Precoder, Option<usize>, Vec<f64>)> {
    match source {
        PrecoderSource::Svd => {
            let svd = svd_decompose(h);
            let f = precoder_from_svd(&svd, s)?;
            let gammas = svd_post_snr(&svd.sigma, s, es_over_n0)?;
            Ok((f, None, gammas.into_inner()))
        }
        PrecoderSource::Codebooks(_) => {
            let cb = source
                .codebook_for(h.nt(), s)
                .ok_or_else(|| Error::Dimension(format!("no codebook for nt={} with {s} streams", h.nt())))?;
            let (idx, f) = select_codebook_precoder(h, cb)?;
            let gammas = zf_post_snr(h, f, es_over_n0)?;
            Ok((f.clone(), Some(idx), gammas.into_inner()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub link: LinkConfig,
    /// Linear `Es/N0`.
    pub es_over_n0: f64,
    /// Video source rate in bits/s.
    pub source_rate: f64,
    /// Mean packet size in symbols.
    pub mean_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionPlan {
    pub mode: usize,
    pub precoder: Precoder,
    pub codeword: Option<usize>,
    /// SNRs in the precoder's stream order.
    pub gammas: Vec<f64>,
    /// `stream_order[k]` is the precoder stream carrying class `k`.
    pub stream_order: Vec<usize>,
    /// Links in class order (least reliable first).
    pub links: Vec<StreamLink>,
    pub code: CodeRate,
    pub thresholds: ThresholdPolicy,
    pub wt: f64,
    /// Post-retransmission sum throughput `C·Σ R_i/r_i`, bits/s.
    pub throughput: f64,
}

/// Full plan for a fixed mode `s`.
pub fn plan_for_mode(
    h: &ChannelRealization,
    s: usize,
    dist: &VisibilityDistribution,
    config: &PlanConfig,
    source: &PrecoderSource,
) -> Result<TransmissionPlan> {
    let (precoder, codeword, gammas) = stream_snrs(h, s, config.es_over_n0, source)?;
    let mcs = select_mcs(&gammas, &config.link)?;
    let stream_order = order_streams(&mcs.links);
    let links = apply_order(&mcs.links, &stream_order);
    let thresholds = optimal_thresholds(dist, &links)?;
    let wt = weighted_throughput_prioritized(&thresholds, &links, dist, config.mean_b)?;
    Ok(TransmissionPlan {
        mode: s,
        precoder,
        codeword,
        gammas,
        stream_order,
        links,
        code: mcs.code,
        thresholds,
        wt,
        throughput: mcs.throughput,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCandidate {
    pub mode: usize,
    pub wt: f64,
    pub throughput: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecision {
    pub plan: TransmissionPlan,
    pub candidates: Vec<ModeCandidate>,
    /// `false` when no mode sustains the source rate; `plan` is then the
    /// unconstrained best effort.
    pub rate_met: bool,
}

/// Evaluates every mode `1..=min(nt, nr)` and keeps the best weighted
/// throughput among modes whose throughput exceeds the source rate.
pub fn select_mode(
    h: &ChannelRealization,
    dist: &VisibilityDistribution,
    config: &PlanConfig,
    source: &PrecoderSource,
) -> Result<ModeDecision> {
    let mut plans = Vec::new();
    let mut last_err = None;
    for s in 1..=h.max_streams() {
        if !source.supports(h.nt(), s) {
            continue;
        }
        match plan_for_mode(h, s, dist, config, source) {
            Ok(p) => plans.push(p),
            Err(e @ Error::Singular { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    if plans.is_empty() {
        return Err(last_err.unwrap_or_else(|| Error::invalid("no usable transmission mode")));
    }
    let candidates: Vec<ModeCandidate> = plans
        .iter()
        .map(|p| ModeCandidate {
            mode: p.mode,
            wt: p.wt,
            throughput: p.throughput,
            feasible: p.throughput > config.source_rate,
        })
        .collect();
    let argmax = |feasible_only: bool| {
        let mut best: Option<usize> = None;
        for (k, c) in candidates.iter().enumerate() {
            if feasible_only && !c.feasible {
                continue;
            }
            if best.is_none_or(|b| c.wt > candidates[b].wt) {
                best = Some(k);
            }
        }
        best
    };
    let (pick, rate_met) = match argmax(true) {
        Some(k) => (k, true),
        None => (argmax(false).expect("at least one plan"), false),
    };
    Ok(ModeDecision { plan: plans.swap_remove(pick), candidates, rate_met })
}

/// Serializable per-stream summary, in class order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamRecord {
    pub stream: usize,
    pub gamma_db: f64,
    pub gamma: f64,
    #[serde(rename = "M")]
    pub modulation: Modulation,
    #[serde(rename = "C")]
    pub code_rate: String,
    pub coding_gain_db: f64,
    pub alpha: f64,
    pub r: f64,
    pub p_success: f64,
    pub rate: f64,
    pub retx_limit: u32,
}

/// JSON form of a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub mode: usize,
    pub stream_order: Vec<usize>,
    pub streams: Vec<StreamRecord>,
    pub thresholds: ThresholdPolicy,
    pub wt: f64,
    pub throughput: f64,
    pub source_rate: f64,
    pub rate_met: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codeword: Option<usize>,
    pub precoder: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub candidates: Vec<ModeCandidate>,
}

impl PlanRecord {
    pub fn from_decision(decision: &ModeDecision, source_rate: f64) -> Self {
        let mut rec = Self::from_plan(&decision.plan, source_rate, decision.rate_met);
        rec.candidates = decision.candidates.clone();
        rec
    }

    pub fn from_plan(plan: &TransmissionPlan, source_rate: f64, rate_met: bool) -> Self {
        let streams = plan
            .links
            .iter()
            .zip(&plan.stream_order)
            .map(|(l, &stream)| StreamRecord {
                stream,
                gamma_db: linear_to_db(l.gamma),
                gamma: l.gamma,
                modulation: l.modulation,
                code_rate: l.code.label(),
                coding_gain_db: l.code.gain_db(),
                alpha: l.alpha,
                r: l.r,
                p_success: l.p_success,
                rate: l.rate,
                retx_limit: l.retx_limit,
            })
            .collect();
        Self {
            mode: plan.mode,
            stream_order: plan.stream_order.clone(),
            streams,
            thresholds: plan.thresholds.clone(),
            wt: plan.wt,
            throughput: plan.throughput,
            source_rate,
            rate_met,
            codeword: plan.codeword,
            precoder: plan.precoder.to_json_rows(),
            candidates: Vec::new(),
        }
    }

    /// Rebuilds the per-stream links, in class order, from the record.
    pub fn links(&self) -> Result<Vec<StreamLink>> {
        self.streams
            .iter()
            .map(|s| {
                let code = CodeRate::parse_fraction(&s.code_rate)?.with_gain(s.coding_gain_db)?;
                Ok(StreamLink {
                    gamma: s.gamma,
                    modulation: s.modulation,
                    code,
                    alpha: s.alpha,
                    retx_limit: s.retx_limit,
                    r: s.r,
                    p_success: s.p_success,
                    rate: s.rate,
                })
            })
            .collect()
    }
}
