//! Error-bound evaluation, step-size optimization, and batch parameter
//! sweeps with CSV/JSON emission.

mod bound;
mod config;
mod figures;
mod optimize;
mod scaling;

pub use bound::{tree_bound, BoundReport};
pub use config::SweepConfig;
pub use figures::{
    figure3_sweep, figure4_sweep, figure5_sweep, fit_decay_exponent, Fig3Config, Fig4Config,
    Fig5Config,
};
pub use optimize::{optimize_eps, EpsOptimum};
pub use scaling::{default_eps_grid, gate_scaling_report, GateScalingReport, GateScalingRow};

use std::path::Path;

use crate::error::Result;

/// Formats a float with 17 significant digits; CSV cells are bit-exactly
/// reproducible from this.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// In-memory CSV table with LF line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        CsvTable {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, dir: &Path) -> Result<std::path::PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        std::fs::write(&path, self.to_csv_string())?;
        Ok(path)
    }
}

/// Least-squares slope of ln(y) against ln(x).
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_slope(&pts)
}

/// Least-squares slope of y against x.
pub fn linear_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
