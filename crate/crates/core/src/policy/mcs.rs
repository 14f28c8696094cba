//! Per-stream modulation and common code-rate selection.

use serde::{Deserialize, Serialize};

use crate::link::{
    baseline_per, mean_retransmissions, success_probability, CodeRate, LinkConfig, Modulation, StreamLink,
};
use crate::Result;

/// Prioritized-transmission MCS: one modulation per stream, one code rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McsChoice {
    pub modulations: Vec<Modulation>,
    pub code: CodeRate,
    /// Links in original stream order.
    pub links: Vec<StreamLink>,
    /// `C·Σ R_i/r_i`, bits/s.
    pub throughput: f64,
}

/// Two-step selection: for each code rate pick every stream's modulation
/// maximizing `R/r`, then pick the code rate maximizing `C·Σ R_i/r_i`.
/// Ties resolve to the lower order and lower rate.
pub fn select_mcs(gammas: &[f64], config: &LinkConfig) -> Result<McsChoice> {
    config.validate()?;
    let cfg = config.normalized();
    let mut best: Option<McsChoice> = None;
    for &code in &cfg.code_rates {
        let links: Vec<StreamLink> = gammas
            .iter()
            .map(|&g| {
                let mut pick: Option<StreamLink> = None;
                for &m in &cfg.modulations {
                    let cand = cfg.link(g, m, code);
                    if pick.as_ref().is_none_or(|p| cand.goodput() > p.goodput()) {
                        pick = Some(cand);
                    }
                }
                pick.expect("non-empty modulation set")
            })
            .collect();
        let throughput = code.value() * links.iter().map(StreamLink::goodput).sum::<f64>();
        if best.as_ref().is_none_or(|b| throughput > b.throughput) {
            best =
                Some(McsChoice { modulations: links.iter().map(|l| l.modulation).collect(), code, links, throughput });
        }
    }
    Ok(best.expect("non-empty code set"))
}

/// Conventional MCS: a single modulation on all streams, packets spread
/// over every stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineChoice {
    pub modulation: Modulation,
    pub code: CodeRate,
    pub links: Vec<StreamLink>,
    pub alpha: f64,
    pub r: f64,
    pub p_success: f64,
    /// `S·C·R/r_b`, bits/s.
    pub throughput: f64,
}

/// Exhaustive search over `M × C` maximizing `S·C·R/r_b`.
pub fn baseline_mcs(gammas: &[f64], config: &LinkConfig) -> Result<BaselineChoice> {
    config.validate()?;
    let cfg = config.normalized();
    let s = gammas.len() as f64;
    let mut best: Option<BaselineChoice> = None;
    for &code in &cfg.code_rates {
        for &m in &cfg.modulations {
            let links: Vec<StreamLink> = gammas.iter().map(|&g| cfg.link(g, m, code)).collect();
            let alphas: Vec<f64> = links.iter().map(|l| l.alpha).collect();
            let alpha = baseline_per(&alphas).min(crate::link::ALPHA_CLAMP);
            let r = mean_retransmissions(alpha, cfg.retx_limit).mean;
            let throughput = s * code.value() * m.rate(cfg.bandwidth_hz) / r;
            if best.as_ref().is_none_or(|b| throughput > b.throughput) {
                best = Some(BaselineChoice {
                    modulation: m,
                    code,
                    links,
                    alpha,
                    r,
                    p_success: success_probability(alpha, cfg.retx_limit),
                    throughput,
                });
            }
        }
    }
    Ok(best.expect("non-empty MCS sets"))
}
