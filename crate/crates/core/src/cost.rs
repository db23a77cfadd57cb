//! Cost accounting for presolve passes, simplex solves and policy decisions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::presolve::Work;
use crate::simplex::SolveReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    /// Deterministic counters. All weights are integers so episode sums are
    /// exact in `f64`.
    #[default]
    WorkUnits,
    /// Measured seconds.
    WallClock,
}

impl fmt::Display for CostMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostMode::WorkUnits => "work_units",
            CostMode::WallClock => "wall_clock",
        })
    }
}

impl FromStr for CostMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "work_units" | "workunits" | "work" => Ok(CostMode::WorkUnits),
            "wall_clock" | "wallclock" | "wall" => Ok(CostMode::WallClock),
            other => Err(format!("unknown cost model {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    pub mode: CostMode,
    /// Per matrix entry, row or column inspected by a presolver.
    pub w_scan: f64,
    /// Per reduction applied.
    pub w_apply: f64,
    /// Per simplex pivot and per unit of problem size (`rows + nnz`).
    pub w_pivot: f64,
    /// Per policy decision (feature extraction plus one forward pass).
    pub w_decision: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            mode: CostMode::WorkUnits,
            w_scan: 1.0,
            w_apply: 4.0,
            w_pivot: 1.0,
            w_decision: 100.0,
        }
    }
}

impl CostModel {
    pub fn wall_clock() -> Self {
        CostModel {
            mode: CostMode::WallClock,
            ..CostModel::default()
        }
    }

    pub fn with_mode(mode: CostMode) -> Self {
        CostModel {
            mode,
            ..CostModel::default()
        }
    }

    /// All weights strictly positive and finite.
    pub fn validate(&self) -> Result<(), String> {
        for (name, w) in [
            ("w_scan", self.w_scan),
            ("w_apply", self.w_apply),
            ("w_pivot", self.w_pivot),
            ("w_decision", self.w_decision),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(format!("{name} must be positive, got {w}"));
            }
        }
        Ok(())
    }

    pub fn presolve_cost(&self, work: &Work, seconds: f64) -> f64 {
        match self.mode {
            CostMode::WorkUnits => {
                work.scanned as f64 * self.w_scan + work.applied as f64 * self.w_apply
            }
            CostMode::WallClock => seconds,
        }
    }

    pub fn solve_cost(&self, report: &SolveReport) -> f64 {
        match self.mode {
            CostMode::WorkUnits => {
                report.iterations as f64 * self.w_pivot * (report.rows + report.nnz) as f64
            }
            CostMode::WallClock => report.elapsed_secs,
        }
    }

    pub fn decision_cost(&self, seconds: f64) -> f64 {
        match self.mode {
            CostMode::WorkUnits => self.w_decision,
            CostMode::WallClock => seconds,
        }
    }
}
