//! Chaos comparison table evaluated in parallel.

use rayon::prelude::*;
use zlorenz_core::chaos::{chaos_row, ChaosError, ChaosRow, LyapunovConfig};
use zlorenz_core::dynamics::SystemSpec;

/// Same rows as the sequential table, in input order, one worker per row.
pub fn par_chaos_table(specs: &[SystemSpec], cfg: &LyapunovConfig) -> Result<Vec<ChaosRow>, ChaosError> {
    if specs.is_empty() {
        return Err(ChaosError::NoSystems);
    }
    Ok(specs.par_iter().map(|s| chaos_row(s, cfg)).collect())
}

pub fn format_table(rows: &[ChaosRow]) -> String {
    let mut out = String::from("system  n   lambda1      stderr\n");
    for r in rows {
        let n = r.n().map(|n| n.to_string()).unwrap_or_else(|| "-".into());
        match &r.outcome {
            Ok(e) => out.push_str(&format!("{:<7} {:<3} {:<12.6} {:.6}\n", r.system(), n, e.lambda1, e.stderr)),
            Err(e) => out.push_str(&format!("{:<7} {:<3} failed: {e}\n", r.system(), n)),
        }
    }
    out
}
