use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use vismimo::channel::{generate_codebook, sample_rayleigh, ChannelRealization, Codebook};
use vismimo::experiments::{
    coherence_sweep, simulate_session, snr_sweep, GainConfig, SessionConfig, SweepResult, SweepRow,
};
use vismimo::policy::{plan_for_mode, select_mode, PlanConfig, PlanRecord, PrecoderSource};
use vismimo::rng::{stream_rng, Purpose};
use vismimo::visibility::{ingest_trace, PacketRecord, VisibilityDistribution, VisibilityWindow};

use crate::config::{Mode, RunConfig};

fn with_output<F>(out: Option<&Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn load_trace(cfg: &RunConfig, seed: u64) -> Result<Vec<PacketRecord>> {
    match &cfg.trace {
        Some(path) => ingest_trace(path).with_context(|| format!("trace {}", path.display())),
        None => Ok(cfg.source.generate(cfg.trace_packets, &mut stream_rng(seed, Purpose::Trace, 0))?),
    }
}

/// Visibility estimate and mean packet size from the first window of the trace.
fn planning_window(cfg: &RunConfig, trace: &[PacketRecord]) -> Result<(VisibilityDistribution, f64)> {
    let mut window = VisibilityWindow::new(cfg.kde_window)?;
    for p in trace.iter().take(cfg.kde_window) {
        window.push(p.visibility, p.size_symbols);
    }
    if window.is_empty() {
        bail!("trace: no packets to seed the visibility estimate");
    }
    Ok((window.distribution(cfg.kde_bandwidth, cfg.kernel)?, window.mean_size()?))
}

fn precoder_source(cfg: &RunConfig) -> Result<PrecoderSource> {
    match &cfg.codebook {
        None => Ok(PrecoderSource::Svd),
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cb = Codebook::from_json(&text).with_context(|| format!("codebook {}", path.display()))?;
            if cb.nt() != cfg.nt {
                bail!("codebook: built for nt={} but nt={}", cb.nt(), cfg.nt);
            }
            Ok(PrecoderSource::Codebooks(vec![cb]))
        }
    }
}

fn write_sidecar<P: SweepRow>(sweep: &SweepResult<P>, out: Option<&Path>) -> Result<()> {
    if let Some(path) = out {
        let side = path.with_extension("json");
        std::fs::write(&side, sweep.sidecar_json()? + "\n").with_context(|| format!("writing {}", side.display()))?;
    }
    Ok(())
}

pub fn plan(cfg: &RunConfig, channel: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let seed = cfg.resolved_seed()?;
    let h = match channel {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let rows: Vec<Vec<[f64; 2]>> =
                serde_json::from_str(&text).with_context(|| format!("channel {}", path.display()))?;
            ChannelRealization::from_json_rows(&rows).with_context(|| format!("channel {}", path.display()))?
        }
        None => sample_rayleigh(cfg.nr, cfg.nt, &mut stream_rng(seed, Purpose::Channel, 0)),
    };
    let trace = load_trace(cfg, seed)?;
    let (dist, mean_b) = planning_window(cfg, &trace)?;
    let plan_cfg = PlanConfig { link: cfg.link()?, es_over_n0: cfg.es_over_n0(), source_rate: cfg.source_rate, mean_b };
    let source = precoder_source(cfg)?;
    let record = match cfg.mode {
        Mode::Adaptive => PlanRecord::from_decision(&select_mode(&h, &dist, &plan_cfg, &source)?, cfg.source_rate),
        Mode::Fixed(s) => {
            if s > h.max_streams() {
                bail!("mode: {s} streams do not fit a {}x{} channel", h.nr(), h.nt());
            }
            let plan = plan_for_mode(&h, s, &dist, &plan_cfg, &source)?;
            let met = plan.throughput > cfg.source_rate;
            PlanRecord::from_plan(&plan, cfg.source_rate, met)
        }
    };
    with_output(out, |w| {
        serde_json::to_writer_pretty(&mut *w, &record)?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn gains(cfg: &RunConfig, streams: usize, out: Option<&Path>) -> Result<()> {
    let seed = cfg.resolved_seed()?;
    if streams == 0 || streams > cfg.nt.min(cfg.nr) {
        bail!("streams: {streams} do not fit a {}x{} channel", cfg.nr, cfg.nt);
    }
    if cfg.snr_grid_db.is_empty() {
        bail!("snr_grid_db: the grid is empty");
    }
    let trace = load_trace(cfg, seed)?;
    let (visibility, _) = planning_window(cfg, &trace)?;
    let gain_cfg =
        GainConfig { nt: cfg.nt, nr: cfg.nr, streams, es_over_n0: cfg.es_over_n0(), link: cfg.link()?, visibility };
    let sweep = snr_sweep(&gain_cfg, &cfg.snr_grid_db, cfg.trials, seed, &precoder_source(cfg)?)?;
    with_output(out, |w| Ok(sweep.write_csv(w)?))?;
    write_sidecar(&sweep, out)
}

fn session_config(cfg: &RunConfig, coherence: usize) -> Result<SessionConfig> {
    Ok(SessionConfig {
        nt: cfg.nt,
        nr: cfg.nr,
        mode: cfg.mode.into(),
        es_over_n0: cfg.es_over_n0(),
        link: cfg.link()?,
        kde: cfg.kde(),
        coherence,
        source_rate: cfg.source_rate,
    })
}

pub fn simulate(cfg: &RunConfig, coherence: usize, out: Option<&Path>) -> Result<()> {
    let seed = cfg.resolved_seed()?;
    let trace = load_trace(cfg, seed)?;
    let result = simulate_session(&trace, None, &session_config(cfg, coherence)?, seed)?;
    with_output(out, |w| Ok(result.write_csv(w)?))
}

pub fn simulate_sweep(cfg: &RunConfig, lengths: &[usize], out: Option<&Path>) -> Result<()> {
    let seed = cfg.resolved_seed()?;
    let trace = load_trace(cfg, seed)?;
    let sweep = coherence_sweep(&trace, None, lengths, &session_config(cfg, 1)?, seed)?;
    with_output(out, |w| Ok(sweep.write_csv(w)?))?;
    write_sidecar(&sweep, out)
}

pub fn codebook(cfg: &RunConfig, streams: usize, bits: u32, iterations: usize, out: Option<&Path>) -> Result<()> {
    let seed = cfg.resolved_seed()?;
    let cb = generate_codebook(cfg.nt, streams, bits, iterations, &mut stream_rng(seed, Purpose::Codebook, 0))?;
    with_output(out, |w| {
        w.write_all(cb.to_json()?.as_bytes())?;
        writeln!(w)?;
        Ok(())
    })
}
