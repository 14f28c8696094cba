//! Packet traces: CSV ingest and synthetic sources.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::glm::{estimate_visibility, GlmModel};
use super::kde::VisibilityDistribution;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub id: u64,
    pub visibility: f64,
    pub size_symbols: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub features: Vec<f64>,
}

impl PacketRecord {
    pub fn new(id: u64, visibility: f64, size_symbols: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::invalid(format!("visibility {visibility} outside [0, 1]")));
        }
        if size_symbols == 0 {
            return Err(Error::invalid("packet size must be at least one symbol"));
        }
        Ok(Self { id, visibility, size_symbols, features: Vec::new() })
    }
}

pub fn ingest_trace(path: impl AsRef<Path>) -> Result<Vec<PacketRecord>> {
    read_trace(std::fs::File::open(path)?)
}

/// Reads `id,visibility,size_symbols[,features...]` with a header row.
pub fn read_trace<R: Read>(reader: R) -> Result<Vec<PacketRecord>> {
    parse_trace(reader, None)
}

/// Like [`read_trace`], scoring rows whose visibility cell is empty from
/// their feature columns.
pub fn read_trace_with_model<R: Read>(reader: R, model: &GlmModel) -> Result<Vec<PacketRecord>> {
    parse_trace(reader, Some(model))
}

fn parse_trace<R: Read>(reader: R, model: Option<&GlmModel>) -> Result<Vec<PacketRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["id", "visibility", "size_symbols"];
    if headers.len() < 3 || headers.iter().take(3).ne(expected) {
        return Err(Error::Parse {
            line: 1,
            message: "expected header 'id,visibility,size_symbols[,features...]'".into(),
        });
    }
    let n_features = headers.len() - 3;
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let line = idx + 2;
        let rec = rec?;
        let err = |message: String| Error::Parse { line, message };
        if rec.len() != headers.len() {
            return Err(err(format!("expected {} fields, found {}", headers.len(), rec.len())));
        }
        let id: u64 = rec[0].parse().map_err(|_| err(format!("bad id '{}'", &rec[0])))?;
        let features = (0..n_features)
            .map(|k| rec[3 + k].parse::<f64>().map_err(|_| err(format!("bad feature '{}'", &rec[3 + k]))))
            .collect::<Result<Vec<f64>>>()?;
        let visibility = match (rec[1].is_empty(), model) {
            (true, Some(m)) => estimate_visibility(&features, m).map_err(|e| err(e.to_string()))?,
            _ => rec[1].parse::<f64>().map_err(|_| err(format!("bad visibility '{}'", &rec[1])))?,
        };
        if !(0.0..=1.0).contains(&visibility) {
            return Err(err(format!("visibility {visibility} outside [0, 1]")));
        }
        let size_symbols: u32 = rec[2].parse().map_err(|_| err(format!("bad size '{}'", &rec[2])))?;
        if size_symbols == 0 {
            return Err(err("packet size must be at least one symbol".into()));
        }
        out.push(PacketRecord { id, visibility, size_symbols, features });
    }
    Ok(out)
}

pub fn write_trace<W: Write>(records: &[PacketRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let n_features = records.first().map_or(0, |r| r.features.len());
    let mut header = vec!["id".to_string(), "visibility".into(), "size_symbols".into()];
    header.extend((0..n_features).map(|k| format!("x{}", k + 1)));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.id.to_string(), r.visibility.to_string(), r.size_symbols.to_string()];
        row.extend(r.features.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `E[b]` over the last `window` records (all records when `None`).
pub fn mean_packet_size(records: &[PacketRecord], window: Option<usize>) -> Result<f64> {
    let start = window.map_or(0, |w| records.len().saturating_sub(w));
    let tail = &records[start..];
    if tail.is_empty() {
        return Err(Error::EmptyWindow);
    }
    Ok(tail.iter().map(|r| r.size_symbols as f64).sum::<f64>() / tail.len() as f64)
}

/// Per-frame-type packet count and visibility range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub packets: usize,
    pub visibility: (f64, f64),
}

/// Synthetic GoP-structured source.
///
/// Each frame in the repeating `pattern` (letters `I`, `P`, `B`) emits a
/// fixed number of packets with visibilities drawn uniformly from its
/// frame-type range. Every `scene_packets` packets a new scene offset is
/// drawn from `[-scene_shift, scene_shift]` and added to all visibilities,
/// which makes the trace bursty on short time scales. Packet size grows
/// linearly with visibility between `min_symbols` and `max_symbols`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GopSource {
    pub pattern: String,
    pub i_frame: FrameSpec,
    pub p_frame: FrameSpec,
    pub b_frame: FrameSpec,
    pub min_symbols: u32,
    pub max_symbols: u32,
    pub scene_packets: usize,
    pub scene_shift: f64,
}

impl Default for GopSource {
    fn default() -> Self {
        Self {
            pattern: "IBPBP".into(),
            i_frame: FrameSpec { packets: 6, visibility: (0.65, 1.0) },
            p_frame: FrameSpec { packets: 3, visibility: (0.3, 0.7) },
            b_frame: FrameSpec { packets: 2, visibility: (0.0, 0.35) },
            min_symbols: 100,
            max_symbols: 400,
            scene_packets: 0,
            scene_shift: 0.0,
        }
    }
}

impl GopSource {
    pub fn validate(&self) -> Result<()> {
        if self.pattern.is_empty() || self.pattern.chars().any(|c| !matches!(c, 'I' | 'P' | 'B')) {
            return Err(Error::invalid(format!("GoP pattern '{}' must be non-empty over I/P/B", self.pattern)));
        }
        for spec in [self.i_frame, self.p_frame, self.b_frame] {
            let (lo, hi) = spec.visibility;
            if !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
                return Err(Error::invalid(format!("visibility range ({lo}, {hi}) must satisfy 0 <= lo <= hi <= 1")));
            }
        }
        if self.min_symbols == 0 || self.max_symbols < self.min_symbols {
            return Err(Error::invalid("need 1 <= min_symbols <= max_symbols"));
        }
        Ok(())
    }

    fn frame(&self, c: char) -> FrameSpec {
        match c {
            'I' => self.i_frame,
            'P' => self.p_frame,
            _ => self.b_frame,
        }
    }

    pub fn size_for(&self, visibility: f64) -> u32 {
        let span = (self.max_symbols - self.min_symbols) as f64;
        self.min_symbols + (span * visibility).round() as u32
    }

    pub fn generate<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<PacketRecord>> {
        self.validate()?;
        let frames: Vec<char> = self.pattern.chars().collect();
        let mut out = Vec::with_capacity(count);
        let mut shift = 0.0;
        let mut frame_idx = 0usize;
        while out.len() < count {
            let spec = self.frame(frames[frame_idx % frames.len()]);
            frame_idx += 1;
            for _ in 0..spec.packets {
                if out.len() == count {
                    break;
                }
                if self.scene_packets > 0 && out.len() % self.scene_packets == 0 && self.scene_shift > 0.0 {
                    shift = rng.gen_range(-self.scene_shift..=self.scene_shift);
                }
                let (lo, hi) = spec.visibility;
                let base = if hi > lo { rng.gen_range(lo..hi) } else { lo };
                let v = (base + shift).clamp(0.0, 1.0);
                out.push(PacketRecord::new(out.len() as u64, v, self.size_for(v))?);
            }
        }
        Ok(out)
    }
}

/// i.i.d. packets drawn from `dist`, all of `size_symbols` symbols.
pub fn sample_iid_trace<R: Rng + ?Sized>(
    dist: &VisibilityDistribution,
    count: usize,
    size_symbols: u32,
    rng: &mut R,
) -> Result<Vec<PacketRecord>> {
    (0..count).map(|i| PacketRecord::new(i as u64, dist.sample(rng), size_symbols)).collect()
}
