//! Prioritizing interleaver: which symbol each spatial row carries per channel use.
//!
//! Symbols are numbered 1-based in class order: all symbols of class 1
//! packets first, then class 2, and so on. At channel use `i`, row `m`
//! carries the `i`-th symbol of class `m`'s block, and idles once that
//! block is exhausted. Moving to the next use shifts every active row one
//! symbol to the right.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-row symbol index at one channel use; `None` marks an idle row.
pub type Assignment = Vec<Option<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleaverMap {
    /// Symbols in each row's class block; zero for rows without a class.
    block_sizes: Vec<usize>,
    /// 1-based global index of the first symbol of each row's block.
    bases: Vec<usize>,
}

/// Builds the map from per-class packet sizes (in symbols) for `rows`
/// spatial rows; `classes[m]` is carried by row `m`.
pub fn build_interleaver(classes: &[Vec<u32>], rows: usize) -> Result<InterleaverMap> {
    if classes.is_empty() {
        return Err(Error::invalid("interleaver needs at least one class"));
    }
    if classes.len() > rows {
        return Err(Error::Dimension(format!("{} classes for {rows} rows", classes.len())));
    }
    let mut block_sizes: Vec<usize> = classes.iter().map(|c| c.iter().map(|&b| b as usize).sum()).collect();
    block_sizes.resize(rows, 0);
    let mut bases = Vec::with_capacity(rows);
    let mut next = 1;
    for &size in &block_sizes {
        bases.push(next);
        next += size;
    }
    Ok(InterleaverMap { block_sizes, bases })
}

impl InterleaverMap {
    pub fn rows(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn total_symbols(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Channel uses until every block is exhausted.
    pub fn uses(&self) -> usize {
        self.block_sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    /// Global symbol range (1-based, half-open) of row `m`'s block.
    pub fn row_range(&self, m: usize) -> std::ops::Range<usize> {
        self.bases[m]..self.bases[m] + self.block_sizes[m]
    }

    /// Direct construction of the assignment at 1-based use `i`.
    pub fn assignment(&self, i: usize) -> Assignment {
        (0..self.rows()).map(|m| (i >= 1 && i <= self.block_sizes[m]).then(|| self.bases[m] + i - 1)).collect()
    }

    /// Assignment at use `i + 1` obtained by sliding the one at use `i`.
    pub fn slide(&self, current: &[Option<usize>]) -> Assignment {
        current
            .iter()
            .enumerate()
            .map(|(m, sym)| sym.map(|n| n + 1).filter(|n| self.row_range(m).contains(n)))
            .collect()
    }

    /// Every use from 1 to [`uses`](Self::uses), generated by sliding.
    pub fn schedule(&self) -> Vec<Assignment> {
        let mut out = Vec::with_capacity(self.uses());
        let mut cur = self.assignment(1);
        for _ in 0..self.uses() {
            let next = self.slide(&cur);
            out.push(std::mem::replace(&mut cur, next));
        }
        out
    }
}

/// Conventional interleaver: use `i` carries symbols `(i−1)·rows + 1 ..= i·rows`.
pub fn sequential_schedule(total_symbols: usize, rows: usize) -> Vec<Assignment> {
    let uses = total_symbols.div_ceil(rows.max(1));
    (1..=uses)
        .map(|i| {
            (0..rows)
                .map(|m| {
                    let n = (i - 1) * rows + m + 1;
                    (n <= total_symbols).then_some(n)
                })
                .collect()
        })
        .collect()
}
