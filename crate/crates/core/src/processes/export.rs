//! Fixed-schema exports for simulated paths: a long-format event CSV and a
//! serializable terminal-count summary.

use std::io::{self, Write};

use serde::Serialize;

use crate::distributions::BTParams;
use crate::error::Result;
use crate::stats;
use super::EventPath;

/// Write paths as long-format CSV with the fixed header
/// `path_id,event_index,time,jump,cumulative_count`. Path ids are zero-based
/// in input order; event indices are one-based within a path; times carry
/// twelve significant digits so re-reads reproduce path ordering exactly.
pub fn write_events_csv<W: Write>(mut out: W, paths: &[EventPath]) -> io::Result<()> {
    writeln!(out, "path_id,event_index,time,jump,cumulative_count")?;
    for (path_id, path) in paths.iter().enumerate() {
        let mut cumulative = 0u64;
        for (i, ev) in path.events().iter().enumerate() {
            cumulative += ev.jump;
            writeln!(
                out,
                "{},{},{:.11e},{},{}",
                path_id,
                i + 1,
                ev.time,
                ev.jump,
                cumulative
            )?;
        }
    }
    Ok(())
}

/// Terminal-count statistics for a batch of paths drawn under one setting.
#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub params: BTParams,
    pub horizon: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// Dense empirical pmf of the terminal counts, indexed by count.
    pub empirical_pmf: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

/// Summarize terminal counts of a batch simulated under a shared setting.
/// The recorded seed is provenance only; it is not re-derived from paths.
pub fn batch_summary(paths: &[EventPath], seed: u64) -> Result<BatchSummary> {
    let counts: Vec<u64> = paths.iter().map(|p| p.total_count()).collect();
    let pmf = stats::empirical_pmf(&counts)?;
    Ok(BatchSummary {
        params: paths[0].params(),
        horizon: paths[0].horizon(),
        n_paths: paths.len() as u64,
        seed,
        empirical_pmf: pmf.dense(),
        mean: pmf.mean(),
        variance: pmf.variance(),
    })
}
