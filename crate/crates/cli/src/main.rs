#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Mode, RunConfig};
use vismimo::visibility::Kernel;

/// Loss-visibility optimized video transmission over MIMO spatial streams.
///
/// Settings come from built-in defaults, then the `--config` JSON file,
/// then any flags given here.
#[derive(Debug, Parser)]
#[command(name = "vismimo", version, about, long_about)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON run configuration; its fields use the flag names with underscores.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Transmit antennas [default: 4]
    #[arg(long, global = true)]
    nt: Option<usize>,
    /// Receive antennas [default: 4]
    #[arg(long, global = true)]
    nr: Option<usize>,
    /// Stream count, or "adaptive" to pick the best mode per channel [default: adaptive]
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Es/N0 in dB [default: 10]
    #[arg(long = "es-n0-db", global = true, allow_hyphen_values = true)]
    es_n0_db: Option<f64>,
    /// Comma-separated Es/N0 grid in dB for `gains` [default: -4,-1,1,4,6,8,12,15]
    #[arg(long = "snr-grid-db", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    snr_grid_db: Option<Vec<f64>>,
    /// Comma-separated QAM orders [default: 2,4,16,64]
    #[arg(long, global = true, value_delimiter = ',')]
    modulations: Option<Vec<u32>>,
    /// Code rates with coding gains as JSON [default: {"1/2":5,"2/3":4,"3/4":3.5,"5/6":3}]
    #[arg(long = "coding-gains", global = true)]
    coding_gains: Option<String>,
    /// Retransmission limit L [default: 4]
    #[arg(long = "retx-limit", global = true)]
    retx_limit: Option<u32>,
    /// Symbols per packet in the error-rate model [default: 100]
    #[arg(long = "packet-symbols", global = true)]
    packet_symbols: Option<u32>,
    /// Per-stream bandwidth in Hz [default: 1000000]
    #[arg(long = "bandwidth-hz", global = true)]
    bandwidth_hz: Option<f64>,
    /// Packets in the visibility window [default: 500]
    #[arg(long = "kde-window", global = true)]
    kde_window: Option<usize>,
    /// Kernel bandwidth of the visibility estimate [default: 0.05]
    #[arg(long = "kde-bandwidth", global = true)]
    kde_bandwidth: Option<f64>,
    /// Kernel shape: gaussian or epanechnikov [default: gaussian]
    #[arg(long, global = true, value_parser = parse_kernel)]
    kernel: Option<Kernel>,
    /// Packet trace CSV (id,visibility,size_symbols); synthetic GoP source when absent
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    /// Packets drawn from the synthetic source [default: 5000]
    #[arg(long = "trace-packets", global = true)]
    trace_packets: Option<usize>,
    /// Video source rate in bits/s for mode selection [default: 0]
    #[arg(long = "source-rate", global = true)]
    source_rate: Option<f64>,
    /// Codebook JSON for limited-feedback precoding
    #[arg(long, global = true)]
    codebook: Option<PathBuf>,
    /// RNG seed [default: $VISMIMO_SEED, else 1]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials [default: 1000]
    #[arg(long, global = true)]
    trials: Option<usize>,
}

fn parse_kernel(s: &str) -> Result<Kernel, String> {
    match s.to_ascii_lowercase().as_str() {
        "gaussian" => Ok(Kernel::Gaussian),
        "epanechnikov" => Ok(Kernel::Epanechnikov),
        _ => Err(format!("unknown kernel '{s}'")),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan one channel realization and print the plan as JSON.
    Plan {
        /// Channel matrix JSON: rows of [re, im] pairs (nr rows of nt entries)
        #[arg(long)]
        channel: Option<PathBuf>,
        /// Write here instead of stdout
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Gain sweep over the Es/N0 grid as CSV, with a JSON sidecar next to --out.
    Gains {
        /// Spatial streams S [default: 2]
        #[arg(long)]
        streams: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Simulate a session over the trace and print per-block CSV.
    Simulate {
        /// Packets per coherence block [default: 100]
        #[arg(long)]
        coherence: Option<usize>,
        /// Comma-separated coherence lengths; prints one summary row per length instead
        #[arg(long, value_delimiter = ',', conflicts_with = "coherence")]
        sweep: Option<Vec<usize>>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate a precoder codebook as JSON.
    Codebook {
        /// Streams per codeword [default: 2]
        #[arg(long)]
        streams: Option<usize>,
        /// Feedback bits; the codebook holds 2^bits codewords [default: 4]
        #[arg(long)]
        bits: Option<u32>,
        /// Packing iterations [default: 2000]
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

impl Overrides {
    fn apply(self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        set!(nt, nr, mode, es_n0_db, snr_grid_db, modulations, retx_limit, packet_symbols, bandwidth_hz);
        set!(kde_window, kde_bandwidth, kernel, trace_packets, source_rate, trials);
        if let Some(text) = self.coding_gains {
            cfg.coding_gains = serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("coding-gains: {e}"))?;
        }
        if self.trace.is_some() {
            cfg.trace = self.trace;
        }
        if self.codebook.is_some() {
            cfg.codebook = self.codebook;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = cli.overrides.apply()?;
    match cli.command {
        Command::Plan { channel, out } => commands::plan(&cfg, channel.as_deref(), out.as_deref()),
        Command::Gains { streams, out } => commands::gains(&cfg, streams.unwrap_or(2), out.as_deref()),
        Command::Simulate { coherence, sweep, out } => match sweep {
            Some(lengths) => commands::simulate_sweep(&cfg, &lengths, out.as_deref()),
            None => commands::simulate(&cfg, coherence.unwrap_or(100), out.as_deref()),
        },
        Command::Codebook { streams, bits, iterations, out } => commands::codebook(
            &cfg,
            streams.unwrap_or(2),
            bits.unwrap_or(4),
            iterations.unwrap_or(2000),
            out.as_deref(),
        ),
    }
}

/// A closed downstream pipe (`vismimo plan | head`) is not a failure.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    let pipe = Some(std::io::ErrorKind::BrokenPipe);
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>().map(|io| io.kind()) == pipe
            || c.downcast_ref::<serde_json::Error>().and_then(|j| j.io_error_kind()) == pipe
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
