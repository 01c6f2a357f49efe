//! CSV result schemas and deterministic writing.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// One learner-evaluation row. Column order is fixed; failed cells carry
/// empty loss fields. `wall_time_ms` is the only nondeterministic column.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub scenario: String,
    pub seed: u64,
    pub m: u64,
    pub gamma: f64,
    pub learner: String,
    pub robust_loss: Option<f64>,
    pub certified: bool,
    pub binary_loss: Option<f64>,
    pub wall_time_ms: f64,
    pub k: Option<u64>,
    pub t_rounds: Option<u64>,
    pub train_error: Option<f64>,
}

/// One bound-table row in long format: `kind` names the evaluated quantity,
/// the parameter columns that do not apply stay empty.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub kind: String,
    pub zeta_d: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub vc: Option<u64>,
    pub m: Option<u64>,
    pub k: Option<u64>,
    pub value: f64,
}

/// Sorts rows deterministically and writes them as CSV.
pub fn write_result_rows(rows: &mut [ResultRow], path: &Path) -> Result<()> {
    rows.sort_by(|a, b| {
        (&a.scenario, &a.learner, a.m, &a.gamma.to_bits(), a.seed).cmp(&(
            &b.scenario,
            &b.learner,
            b.m,
            &b.gamma.to_bits(),
            b.seed,
        ))
    });
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    for row in rows.iter() {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_bound_rows(rows: &[BoundRow], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
