//! Packet-prioritization and unequal-modulation gains over channel ensembles.
//!
//! For one channel realization the prioritized and baseline weighted
//! throughputs factor as
//!
//! ```text
//! WT_p = [C·Σ R_i/r_i] · [Σ p_i ∫_{class i} v f(v) dv] / E[b]
//! WT_b = [S·C_b·R_b/r_b] · [p_b · E[v]] / E[b]
//! ```
//!
//! The unequal-modulation gain is the ratio of expected throughput factors,
//! with the baseline running its own best equal-modulation MCS. The
//! prioritization gain is the ratio of expected quality factors, both taken
//! on the prioritized MCS: `p_b` is the success probability of a packet spread
//! across all streams with the per-stream error rates `α_i`, so the two
//! quality factors differ only in how packets are mapped to streams.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::map_indexed;
use super::sweep::{SweepResult, SweepRow};
use crate::channel::{sample_rayleigh, ChannelRealization, Codebook};
use crate::link::{baseline_per, success_probability, LinkConfig};
use crate::math::{db_to_linear, CompensatedSum};
use crate::policy::{
    apply_order, baseline_mcs, delivered_quality, optimal_thresholds, order_streams, select_mcs, stream_snrs,
    PrecoderSource,
};
use crate::rng::{stream_rng, Purpose};
use crate::visibility::VisibilityDistribution;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainConfig {
    pub nt: usize,
    pub nr: usize,
    /// Fixed number of spatial streams `S`.
    pub streams: usize,
    /// Linear `Es/N0`.
    pub es_over_n0: f64,
    pub link: LinkConfig,
    pub visibility: VisibilityDistribution,
}

impl GainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nt == 0 || self.nr == 0 {
            return Err(Error::invalid("antenna counts must be positive"));
        }
        if self.streams == 0 || self.streams > self.nt.min(self.nr) {
            return Err(Error::Dimension(format!("{} streams on a {}x{} channel", self.streams, self.nr, self.nt)));
        }
        if !(self.es_over_n0 >= 0.0) {
            return Err(Error::invalid("Es/N0 must be non-negative"));
        }
        self.link.validate()
    }

    fn snapshot(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }
}

/// Numerator and denominator terms of both gains for one realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationGains {
    /// `Σ p_i ∫_{class i} v f(v) dv`.
    pub pp_num: f64,
    /// `p_b · E[v]`, with `p_b` from the prioritized streams' error rates.
    pub pp_den: f64,
    /// `C·Σ R_i/r_i`.
    pub um_num: f64,
    /// `S·C_b·R_b/r_b`.
    pub um_den: f64,
    pub codeword: Option<usize>,
}

impl RealizationGains {
    pub fn g_pp(&self) -> f64 {
        self.pp_num / self.pp_den
    }

    pub fn g_um(&self) -> f64 {
        self.um_num / self.um_den
    }
}

pub fn evaluate_realization(
    h: &ChannelRealization,
    config: &GainConfig,
    source: &PrecoderSource,
) -> Result<RealizationGains> {
    let (_, codeword, gammas) = stream_snrs(h, config.streams, config.es_over_n0, source)?;
    let mcs = select_mcs(&gammas, &config.link)?;
    let ordered = apply_order(&mcs.links, &order_streams(&mcs.links));
    let thresholds = optimal_thresholds(&config.visibility, &ordered)?;
    let pp_num = delivered_quality(&thresholds, &ordered, &config.visibility)?;
    let alphas: Vec<f64> = ordered.iter().map(|l| l.alpha).collect();
    let p_b = success_probability(baseline_per(&alphas), config.link.retx_limit);
    let base = baseline_mcs(&gammas, &config.link)?;
    Ok(RealizationGains {
        pp_num,
        pp_den: p_b * config.visibility.mean(),
        um_num: mcs.throughput,
        um_den: base.throughput,
        codeword,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub g_pp: f64,
    pub g_um: f64,
    /// Exactly `g_pp · g_um`.
    pub g: f64,
    pub stderr_pp: f64,
    pub stderr_um: f64,
    pub stderr_g: f64,
    pub trials: usize,
    /// Smallest single-realization prioritization gain.
    pub min_realization_pp: f64,
    /// Realizations whose prioritization gain fell below one.
    pub realizations_pp_below_one: usize,
    pub seed: Option<u64>,
    pub config: Value,
}

impl SweepRow for GainReport {
    fn header() -> Vec<&'static str> {
        vec!["g_pp", "g_um", "g", "stderr_pp", "stderr_um", "stderr_g", "trials"]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.g_pp.to_string(),
            self.g_um.to_string(),
            self.g.to_string(),
            self.stderr_pp.to_string(),
            self.stderr_um.to_string(),
            self.stderr_g.to_string(),
            self.trials.to_string(),
        ]
    }
}

/// Delete-one jackknife standard error of `stat` over leave-one-out sums.
fn jackknife<F: Fn(usize) -> f64>(n: usize, leave_out: F) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let thetas: Vec<f64> = (0..n).map(leave_out).collect();
    let mean = thetas.iter().copied().collect::<CompensatedSum>().value() / n as f64;
    let ss = thetas.iter().map(|t| (t - mean).powi(2)).collect::<CompensatedSum>().value();
    ((n as f64 - 1.0) / n as f64 * ss).sqrt()
}

fn report(samples: &[RealizationGains], config: &GainConfig, seed: Option<u64>) -> Result<GainReport> {
    if samples.is_empty() {
        return Err(Error::invalid("at least one trial is required"));
    }
    let sum = |f: fn(&RealizationGains) -> f64| samples.iter().map(f).collect::<CompensatedSum>().value();
    let (pn, pd, un, ud) = (sum(|r| r.pp_num), sum(|r| r.pp_den), sum(|r| r.um_num), sum(|r| r.um_den));
    let g_pp = pn / pd;
    let g_um = un / ud;
    let n = samples.len();
    let pp_loo = |k: usize| (pn - samples[k].pp_num) / (pd - samples[k].pp_den);
    let um_loo = |k: usize| (un - samples[k].um_num) / (ud - samples[k].um_den);
    let min_realization_pp = samples.iter().map(RealizationGains::g_pp).fold(f64::INFINITY, f64::min);
    Ok(GainReport {
        g_pp,
        g_um,
        g: g_pp * g_um,
        stderr_pp: jackknife(n, pp_loo),
        stderr_um: jackknife(n, um_loo),
        stderr_g: jackknife(n, |k| pp_loo(k) * um_loo(k)),
        trials: n,
        min_realization_pp,
        realizations_pp_below_one: samples.iter().filter(|r| r.g_pp() < 1.0).count(),
        seed,
        config: config.snapshot(),
    })
}

/// Gains over an explicit list of channel realizations.
pub fn gains_for_channels(
    channels: &[ChannelRealization],
    config: &GainConfig,
    source: &PrecoderSource,
) -> Result<GainReport> {
    config.validate()?;
    let samples = channels.iter().map(|h| evaluate_realization(h, config, source)).collect::<Result<Vec<_>>>()?;
    report(&samples, config, None)
}

fn draw_channel(config: &GainConfig, seed: u64, trial: usize) -> ChannelRealization {
    sample_rayleigh(config.nr, config.nt, &mut stream_rng(seed, Purpose::Channel, trial as u64))
}

fn realizations(
    config: &GainConfig,
    trials: usize,
    seed: u64,
    source: &PrecoderSource,
) -> Result<Vec<RealizationGains>> {
    config.validate()?;
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    map_indexed(trials, |t| evaluate_realization(&draw_channel(config, seed, t), config, source)).into_iter().collect()
}

/// Full-CSI gains over `trials` Rayleigh draws; trial `t` uses the
/// channel stream `(seed, t)`, so results do not depend on thread count.
pub fn monte_carlo_gains(config: &GainConfig, trials: usize, seed: u64) -> Result<GainReport> {
    let samples = realizations(config, trials, seed, &PrecoderSource::Svd)?;
    report(&samples, config, Some(seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitedFeedbackReport {
    pub limited: GainReport,
    /// Same channel draws with SVD precoding.
    pub full_csi: GainReport,
    pub bits: u32,
    /// Selected codeword per trial.
    pub codewords: Vec<usize>,
}

pub fn limited_feedback_gains(
    config: &GainConfig,
    codebook: &Codebook,
    trials: usize,
    seed: u64,
) -> Result<LimitedFeedbackReport> {
    if codebook.nt() != config.nt || codebook.streams() != config.streams {
        return Err(Error::Dimension(format!(
            "codebook is {}x{} but the configuration needs {}x{}",
            codebook.nt(),
            codebook.streams(),
            config.nt,
            config.streams
        )));
    }
    let source = PrecoderSource::Codebooks(vec![codebook.clone()]);
    let limited = realizations(config, trials, seed, &source)?;
    let full = realizations(config, trials, seed, &PrecoderSource::Svd)?;
    Ok(LimitedFeedbackReport {
        codewords: limited.iter().map(|r| r.codeword.expect("codebook precoding")).collect(),
        limited: report(&limited, config, Some(seed))?,
        full_csi: report(&full, config, Some(seed))?,
        bits: codebook.bits(),
    })
}

/// Gain report per `Es/N0` grid point (dB), reusing the same channel
/// draws at every point.
pub fn snr_sweep(
    config: &GainConfig,
    snr_grid_db: &[f64],
    trials: usize,
    seed: u64,
    source: &PrecoderSource,
) -> Result<SweepResult<GainReport>> {
    if snr_grid_db.is_empty() {
        return Err(Error::invalid("SNR grid must be non-empty"));
    }
    let mut points = Vec::with_capacity(snr_grid_db.len());
    for &db in snr_grid_db {
        let cfg = GainConfig { es_over_n0: db_to_linear(db), ..config.clone() };
        let samples = realizations(&cfg, trials, seed, source)?;
        let mut rep = report(&samples, &cfg, Some(seed))?;
        rep.config = Value::Null;
        points.push(rep);
    }
    SweepResult::new("es_n0_db", snr_grid_db.to_vec(), points, seed, config.snapshot())
}
