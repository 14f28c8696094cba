//! Run configuration: a JSON file, then command-line overrides on top.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use vismimo::experiments::ModePolicy;
use vismimo::link::{code_rates_from_json, default_code_rates, CodeRate, LinkConfig, Modulation};
use vismimo::math::db_to_linear;
use vismimo::visibility::{GopSource, KdeParams, Kernel};

pub const SEED_ENV: &str = "VISMIMO_SEED";

/// Fixed stream count or per-realization mode selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Adaptive,
    Fixed(usize),
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("adaptive") {
            return Ok(Mode::Adaptive);
        }
        s.parse::<usize>().map(Mode::Fixed).map_err(|_| format!("mode must be 'adaptive' or a stream count, got '{s}'"))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Adaptive => f.write_str("adaptive"),
            Mode::Fixed(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for Mode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Mode::Adaptive => s.serialize_str("adaptive"),
            Mode::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Mode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(Mode::Fixed(n)),
            Raw::Name(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl From<Mode> for ModePolicy {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Adaptive => ModePolicy::Adaptive,
            Mode::Fixed(s) => ModePolicy::Fixed(s),
        }
    }
}

fn default_gains() -> serde_json::Map<String, serde_json::Value> {
    default_code_rates().iter().map(|c| (c.label(), serde_json::Value::from(c.gain_db()))).collect()
}

/// Everything a run needs. Missing JSON fields take the defaults listed in
/// `vismimo --help`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub nt: usize,
    pub nr: usize,
    pub mode: Mode,
    pub es_n0_db: f64,
    /// Grid for `gains`, dB.
    pub snr_grid_db: Vec<f64>,
    pub modulations: Vec<u32>,
    /// Code rate label to coding gain in dB, e.g. `{"1/2": 5.0}`.
    pub coding_gains: serde_json::Map<String, serde_json::Value>,
    pub retx_limit: u32,
    pub packet_symbols: u32,
    pub bandwidth_hz: f64,
    pub kde_window: usize,
    pub kde_bandwidth: f64,
    pub kernel: Kernel,
    /// Packet trace CSV; a synthetic GoP source is used when absent.
    pub trace: Option<PathBuf>,
    pub source: GopSource,
    /// Packets drawn from the synthetic source.
    pub trace_packets: usize,
    /// Video source rate, bits/s.
    pub source_rate: f64,
    pub codebook: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let kde = KdeParams::default();
        let link = LinkConfig::default();
        Self {
            nt: 4,
            nr: 4,
            mode: Mode::Adaptive,
            es_n0_db: 10.0,
            snr_grid_db: vec![-4.0, -1.0, 1.0, 4.0, 6.0, 8.0, 12.0, 15.0],
            modulations: link.modulations.iter().map(|m| m.order()).collect(),
            coding_gains: default_gains(),
            retx_limit: link.retx_limit,
            packet_symbols: link.packet_symbols,
            bandwidth_hz: link.bandwidth_hz,
            kde_window: kde.window,
            kde_bandwidth: kde.bandwidth,
            kernel: kde.kernel,
            trace: None,
            source: GopSource::default(),
            trace_packets: 5000,
            source_rate: 0.0,
            codebook: None,
            seed: None,
            trials: 1000,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Seed from the config, else `VISMIMO_SEED`, else 1.
    pub fn resolved_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().with_context(|| format!("{SEED_ENV}: '{v}' is not an unsigned integer")),
            Err(_) => Ok(1),
        }
    }

    pub fn es_over_n0(&self) -> f64 {
        db_to_linear(self.es_n0_db)
    }

    pub fn kde(&self) -> KdeParams {
        KdeParams { window: self.kde_window, bandwidth: self.kde_bandwidth, kernel: self.kernel }
    }

    pub fn code_rates(&self) -> Result<Vec<CodeRate>> {
        code_rates_from_json(&serde_json::to_string(&self.coding_gains)?).context("coding_gains")
    }

    pub fn link(&self) -> Result<LinkConfig> {
        let modulations = self
            .modulations
            .iter()
            .map(|&m| Modulation::new(m).with_context(|| format!("modulations: {m}")))
            .collect::<Result<Vec<_>>>()?;
        let link = LinkConfig {
            modulations,
            code_rates: self.code_rates()?,
            retx_limit: self.retx_limit,
            packet_symbols: self.packet_symbols,
            bandwidth_hz: self.bandwidth_hz,
        };
        link.validate().context("link settings")?;
        Ok(link)
    }

    /// Field-level checks shared by every command.
    pub fn validate(&self) -> Result<()> {
        if self.nt == 0 || self.nr == 0 {
            bail!("nt/nr: antenna counts must be at least 1 (got {}x{})", self.nr, self.nt);
        }
        if let Mode::Fixed(s) = self.mode {
            if s == 0 || s > self.nt.min(self.nr) {
                bail!("mode: {s} streams do not fit a {}x{} channel", self.nr, self.nt);
            }
        }
        if !self.es_n0_db.is_finite() {
            bail!("es_n0_db: must be finite");
        }
        if self.modulations.is_empty() {
            bail!("modulations: at least one order is required");
        }
        if self.coding_gains.is_empty() {
            bail!("coding_gains: at least one code rate is required");
        }
        if self.kde_window == 0 {
            bail!("kde_window: must be at least 1");
        }
        if !(self.kde_bandwidth > 0.0) {
            bail!("kde_bandwidth: must be positive");
        }
        if !(self.source_rate >= 0.0) {
            bail!("source_rate: must be non-negative");
        }
        if self.trials == 0 {
            bail!("trials: must be at least 1");
        }
        self.source.validate().context("source")?;
        self.link()?;
        Ok(())
    }
}
