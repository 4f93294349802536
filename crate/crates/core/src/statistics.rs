//! Blocked significance of `J`.
//!
//! The run is cut into `k` equal time blocks, `J` is evaluated per block, and
//! the spread of the block values sets the uncertainty of the total. No
//! counting distribution or error propagation is assumed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::counting::{eberhard_j_reduced, ReducedCounts};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSeries {
    pub block_duration_s: Option<f64>,
    pub j_values: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    pub j_total: i64,
    pub blocks: usize,
    /// Sample standard deviation of the block values.
    pub block_sigma: f64,
    pub sigma_total: f64,
    /// `|j_total| / sigma_total`; `None` when the block values do not vary.
    pub n_sigma: Option<f64>,
}

impl SignificanceReport {
    /// Significance of a total with a known uncertainty.
    pub fn from_total(j_total: i64, sigma_total: f64) -> Self {
        Self {
            j_total,
            blocks: 0,
            block_sigma: f64::NAN,
            sigma_total,
            n_sigma: n_sigma(j_total, sigma_total),
        }
    }

    pub fn is_violation(&self) -> bool {
        self.j_total < 0
    }
}

fn n_sigma(j_total: i64, sigma_total: f64) -> Option<f64> {
    (sigma_total > 0.0).then(|| (j_total as f64).abs() / sigma_total)
}

/// `sigma_total = s · √k` with `s` the `(k − 1)`-denominator standard
/// deviation of the block values.
pub fn blocked_significance(series: &BlockSeries) -> Result<SignificanceReport> {
    let k = series.j_values.len();
    if k < 2 {
        return Err(Error::TooFewBlocks(k));
    }
    let j_total: i64 = series.j_values.iter().sum();
    let mean = j_total as f64 / k as f64;
    let ss: f64 = series.j_values.iter().map(|&j| (j as f64 - mean).powi(2)).sum();
    let s = (ss / (k - 1) as f64).sqrt();
    let sigma_total = s * (k as f64).sqrt();
    Ok(SignificanceReport {
        j_total,
        blocks: k,
        block_sigma: s,
        sigma_total,
        n_sigma: n_sigma(j_total, sigma_total),
    })
}

pub fn blocks_from_counts(blocks: &[ReducedCounts]) -> Result<BlockSeries> {
    if blocks.is_empty() {
        return Err(Error::TooFewBlocks(0));
    }
    for b in blocks {
        b.validate()?;
    }
    let durations: Option<Vec<f64>> = blocks.iter().map(|b| b.duration_s).collect();
    Ok(BlockSeries {
        block_duration_s: durations.and_then(|d| d.first().copied()),
        j_values: blocks.iter().map(eberhard_j_reduced).collect(),
    })
}

/// Writes `block_index, c_oo_11, s_a_1, c_oo_12, s_b_1, c_oo_21, c_oo_22, j`.
pub fn write_block_csv(path: impl AsRef<Path>, blocks: &[ReducedCounts]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "block_index",
        "c_oo_11",
        "s_a_1",
        "c_oo_12",
        "s_b_1",
        "c_oo_21",
        "c_oo_22",
        "j",
    ])?;
    for (i, b) in blocks.iter().enumerate() {
        w.write_record([
            i.to_string(),
            b.c_oo_11.to_string(),
            b.s_a_1.to_string(),
            b.c_oo_12.to_string(),
            b.s_b_1.to_string(),
            b.c_oo_21.to_string(),
            b.c_oo_22.to_string(),
            eberhard_j_reduced(b).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
