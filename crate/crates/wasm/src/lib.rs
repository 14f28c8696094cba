//! Browser bindings for the demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function returning JSON, so the
//! same logic is testable natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use vismimo::channel::ChannelRealization;
use vismimo::experiments::{monte_carlo_gains, GainConfig};
use vismimo::link::LinkConfig;
use vismimo::math::db_to_linear;
use vismimo::policy::{select_mode, PlanConfig, PlanRecord, PrecoderSource};
use vismimo::rng::{stream_rng, Purpose};
use vismimo::visibility::{GopSource, Kernel, VisibilityDistribution, VisibilityWindow};

const WINDOW: usize = 500;

fn window(seed: u64) -> Result<VisibilityWindow, String> {
    let trace =
        GopSource::default().generate(WINDOW, &mut stream_rng(seed, Purpose::Trace, 0)).map_err(|e| e.to_string())?;
    let mut w = VisibilityWindow::new(WINDOW).map_err(|e| e.to_string())?;
    trace.iter().for_each(|p| w.push(p.visibility, p.size_symbols));
    Ok(w)
}

fn distribution(seed: u64, bandwidth: f64) -> Result<VisibilityDistribution, String> {
    window(seed)?.distribution(bandwidth, Kernel::Gaussian).map_err(|e| e.to_string())
}

fn link(retx_limit: u32) -> LinkConfig {
    LinkConfig { retx_limit, ..LinkConfig::default() }
}

#[derive(Serialize)]
struct Density {
    x: Vec<f64>,
    pdf: Vec<f64>,
    mean: f64,
}

/// Visibility density of a synthetic GoP trace on `points` grid values.
pub fn density_json(seed: u64, bandwidth: f64, points: usize) -> Result<String, String> {
    if points < 2 {
        return Err("need at least two grid points".into());
    }
    let dist = distribution(seed, bandwidth)?;
    let x: Vec<f64> = (0..points).map(|k| k as f64 / (points - 1) as f64).collect();
    let pdf = x.iter().map(|&v| dist.pdf(v)).collect();
    serde_json::to_string(&Density { x, pdf, mean: dist.mean() }).map_err(|e| e.to_string())
}

/// Plan for a diagonal channel with the given singular values.
pub fn plan_json(singular_values: &[f64], es_n0_db: f64, retx_limit: u32, seed: u64) -> Result<String, String> {
    let h = ChannelRealization::diagonal(singular_values).map_err(|e| e.to_string())?;
    let w = window(seed)?;
    let dist = w.distribution(0.05, Kernel::Gaussian).map_err(|e| e.to_string())?;
    let cfg = PlanConfig {
        link: link(retx_limit),
        es_over_n0: db_to_linear(es_n0_db),
        source_rate: 0.0,
        mean_b: w.mean_size().map_err(|e| e.to_string())?,
    };
    let decision = select_mode(&h, &dist, &cfg, &PrecoderSource::Svd).map_err(|e| e.to_string())?;
    serde_json::to_string(&PlanRecord::from_decision(&decision, 0.0)).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct GainPoint {
    g_pp: f64,
    g_um: f64,
    g: f64,
    stderr_um: f64,
    trials: usize,
}

/// Monte Carlo gains for an `n x n` Rayleigh channel with `streams` streams.
pub fn gains_json(
    n: usize,
    streams: usize,
    es_n0_db: f64,
    retx_limit: u32,
    trials: usize,
    seed: u64,
) -> Result<String, String> {
    let cfg = GainConfig {
        nt: n,
        nr: n,
        streams,
        es_over_n0: db_to_linear(es_n0_db),
        link: link(retx_limit),
        visibility: distribution(seed, 0.05)?,
    };
    let rep = monte_carlo_gains(&cfg, trials, seed).map_err(|e| e.to_string())?;
    let point = GainPoint { g_pp: rep.g_pp, g_um: rep.g_um, g: rep.g, stderr_um: rep.stderr_um, trials: rep.trials };
    serde_json::to_string(&point).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn density(seed: u32, bandwidth: f64, points: usize) -> Result<String, JsError> {
    density_json(seed as u64, bandwidth, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn plan(singular_values: Vec<f64>, es_n0_db: f64, retx_limit: u32, seed: u32) -> Result<String, JsError> {
    plan_json(&singular_values, es_n0_db, retx_limit, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn gains(
    n: usize,
    streams: usize,
    es_n0_db: f64,
    retx_limit: u32,
    trials: usize,
    seed: u32,
) -> Result<String, JsError> {
    gains_json(n, streams, es_n0_db, retx_limit, trials, seed as u64).map_err(|e| JsError::new(&e))
}
