//! Sweep containers with CSV export and a JSON sidecar.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::{Error, Result};

/// One CSV row per sweep point.
pub trait SweepRow {
    fn header() -> Vec<&'static str>;
    fn row(&self) -> Vec<String>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult<P> {
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub points: Vec<P>,
    pub seed: u64,
    pub config: Value,
}

impl<P: SweepRow> SweepResult<P> {
    pub fn new(axis_name: impl Into<String>, axis: Vec<f64>, points: Vec<P>, seed: u64, config: Value) -> Result<Self> {
        if axis.len() != points.len() {
            return Err(Error::Dimension(format!("{} axis values for {} points", axis.len(), points.len())));
        }
        if axis.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("sweep axis must be strictly increasing"));
        }
        Ok(Self { axis_name: axis_name.into(), axis, points, seed, config })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.axis_name.as_str()];
        header.extend(P::header());
        w.write_record(&header)?;
        for (x, p) in self.axis.iter().zip(&self.points) {
            let mut row = vec![x.to_string()];
            row.extend(p.row());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `{axis_name, axis, seed, config}`.
    pub fn sidecar_json(&self) -> Result<String> {
        let v = serde_json::json!({
            "axis_name": self.axis_name,
            "axis": self.axis,
            "seed": self.seed,
            "config": self.config,
        });
        Ok(serde_json::to_string_pretty(&v)?)
    }
}
