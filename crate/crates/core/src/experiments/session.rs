//! Realized sessions: plans recomputed per coherence block from the running
//! visibility estimate, then scored on the packets actually sent.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::sweep::{SweepResult, SweepRow};
use crate::channel::sample_rayleigh;
use crate::link::LinkConfig;
use crate::math::CompensatedSum;
use crate::policy::{
    baseline_mcs, classify_packets, evaluate_mapping_wt, plan_for_mode, select_mode, weighted_throughput_baseline,
    PlanConfig, PrecoderSource, TransmissionPlan,
};
use crate::rng::{stream_rng, Purpose};
use crate::visibility::{KdeParams, PacketRecord, VisibilityWindow};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModePolicy {
    Fixed(usize),
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub nt: usize,
    pub nr: usize,
    pub mode: ModePolicy,
    /// Linear `Es/N0`.
    pub es_over_n0: f64,
    pub link: LinkConfig,
    pub kde: KdeParams,
    /// Packets per coherence block.
    pub coherence: usize,
    pub source_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOutcome {
    pub block: usize,
    pub mode: usize,
    pub packets: usize,
    /// Delivered visibility per second on this block's packets.
    pub realized_wt: f64,
    pub baseline_wt: f64,
    /// Distribution-level objective the plan was optimized for.
    pub planned_wt: f64,
    pub planned_baseline_wt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub coherence: usize,
    pub blocks: Vec<BlockOutcome>,
    pub realized_wt: f64,
    pub baseline_wt: f64,
    pub planned_wt: f64,
    pub planned_baseline_wt: f64,
    /// `mean(realized) / mean(baseline)`.
    pub realized_gain: f64,
    /// `mean(planned) / mean(planned baseline)`.
    pub planned_gain: f64,
}

impl SessionResult {
    /// Per-block CSV: `block,mode,packets,realized_wt,baseline_wt,planned_wt,planned_baseline_wt`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "block",
            "mode",
            "packets",
            "realized_wt",
            "baseline_wt",
            "planned_wt",
            "planned_baseline_wt",
        ])?;
        for b in &self.blocks {
            w.write_record([
                b.block.to_string(),
                b.mode.to_string(),
                b.packets.to_string(),
                b.realized_wt.to_string(),
                b.baseline_wt.to_string(),
                b.planned_wt.to_string(),
                b.planned_baseline_wt.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl SweepRow for SessionResult {
    fn header() -> Vec<&'static str> {
        vec!["blocks", "realized_wt", "baseline_wt", "realized_gain", "planned_gain"]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.blocks.len().to_string(),
            self.realized_wt.to_string(),
            self.baseline_wt.to_string(),
            self.realized_gain.to_string(),
            self.planned_gain.to_string(),
        ]
    }
}

fn plan_block(
    h: &crate::channel::ChannelRealization,
    dist: &crate::visibility::VisibilityDistribution,
    plan_cfg: &PlanConfig,
    mode: ModePolicy,
) -> Result<TransmissionPlan> {
    match mode {
        ModePolicy::Fixed(s) => plan_for_mode(h, s, dist, plan_cfg, &PrecoderSource::Svd),
        ModePolicy::Adaptive => Ok(select_mode(h, dist, plan_cfg, &PrecoderSource::Svd)?.plan),
    }
}

/// Runs one session over `trace`.
///
/// The window is seeded with `warmup` when given; otherwise the first
/// `kde.window` trace packets seed it and are not transmitted. The rest of
/// the trace is cut into full blocks of `coherence` packets (a trailing
/// partial block is dropped). Block `k` sees the channel drawn from stream
/// `(seed, k)`. After each block its packets enter the window.
pub fn simulate_session(
    trace: &[PacketRecord],
    warmup: Option<&[PacketRecord]>,
    config: &SessionConfig,
    seed: u64,
) -> Result<SessionResult> {
    if config.coherence == 0 {
        return Err(Error::invalid("coherence must be at least one packet"));
    }
    if let ModePolicy::Fixed(s) = config.mode {
        if s == 0 || s > config.nt.min(config.nr) {
            return Err(Error::Dimension(format!("{s} streams on a {}x{} channel", config.nr, config.nt)));
        }
    }
    let mut window = VisibilityWindow::new(config.kde.window)?;
    let body = match warmup {
        Some(w) => {
            w.iter().for_each(|p| window.push(p.visibility, p.size_symbols));
            trace
        }
        None => {
            let n = config.kde.window.min(trace.len());
            trace[..n].iter().for_each(|p| window.push(p.visibility, p.size_symbols));
            &trace[n..]
        }
    };
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if body.len() < config.coherence {
        return Err(Error::TraceTooShort { needed: config.coherence, available: body.len() });
    }

    let mut blocks = Vec::new();
    for (k, packets) in body.chunks_exact(config.coherence).enumerate() {
        let h = sample_rayleigh(config.nr, config.nt, &mut stream_rng(seed, Purpose::Channel, k as u64));
        let dist = window.distribution(config.kde.bandwidth, config.kde.kernel)?;
        let plan_cfg = PlanConfig {
            link: config.link.clone(),
            es_over_n0: config.es_over_n0,
            source_rate: config.source_rate,
            mean_b: window.mean_size()?,
        };
        let plan = plan_block(&h, &dist, &plan_cfg, config.mode)?;
        let classes = classify_packets(&plan.thresholds, packets);
        let realized_wt = evaluate_mapping_wt(&classes, &plan.links, packets)?;

        let base = baseline_mcs(&plan.gammas, &config.link)?;
        let value: f64 = packets.iter().map(|p| p.visibility).collect::<CompensatedSum>().value();
        let symbols: f64 = packets.iter().map(|p| p.size_symbols as f64).sum();
        let time =
            symbols * base.r / (base.code.value() * plan.mode as f64 * base.modulation.rate(config.link.bandwidth_hz));
        let baseline_wt = base.p_success * value / time;

        blocks.push(BlockOutcome {
            block: k,
            mode: plan.mode,
            packets: packets.len(),
            realized_wt,
            baseline_wt,
            planned_wt: plan.wt,
            planned_baseline_wt: weighted_throughput_baseline(&base.links, &dist, plan_cfg.mean_b)?,
        });
        packets.iter().for_each(|p| window.push(p.visibility, p.size_symbols));
    }

    let mean =
        |f: fn(&BlockOutcome) -> f64| blocks.iter().map(f).collect::<CompensatedSum>().value() / blocks.len() as f64;
    let (realized_wt, baseline_wt) = (mean(|b| b.realized_wt), mean(|b| b.baseline_wt));
    let (planned_wt, planned_baseline_wt) = (mean(|b| b.planned_wt), mean(|b| b.planned_baseline_wt));
    Ok(SessionResult {
        coherence: config.coherence,
        realized_gain: realized_wt / baseline_wt,
        planned_gain: planned_wt / planned_baseline_wt,
        blocks,
        realized_wt,
        baseline_wt,
        planned_wt,
        planned_baseline_wt,
    })
}

/// One session per coherence length, all consuming the same trace.
pub fn coherence_sweep(
    trace: &[PacketRecord],
    warmup: Option<&[PacketRecord]>,
    coherence_lengths: &[usize],
    config: &SessionConfig,
    seed: u64,
) -> Result<SweepResult<SessionResult>> {
    let seeded = if warmup.is_some() { 0 } else { config.kde.window.min(trace.len()) };
    let longest = coherence_lengths.iter().copied().max().unwrap_or(0);
    if trace.len() - seeded < longest {
        return Err(Error::TraceTooShort { needed: seeded + longest, available: trace.len() });
    }
    let points = coherence_lengths
        .iter()
        .map(|&c| simulate_session(trace, warmup, &SessionConfig { coherence: c, ..config.clone() }, seed))
        .collect::<Result<Vec<_>>>()?;
    let axis = coherence_lengths.iter().map(|&c| c as f64).collect();
    SweepResult::new("coherence", axis, points, seed, serde_json::to_value(config)?)
}
