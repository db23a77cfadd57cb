//! Presolve reductions, each run as a single greedy pass over the current
//! problem, plus the postsolve stack that undoes them.
//!
//! Every presolver keeps the problem equivalent: the reduced LP is infeasible
//! exactly when the original is, and postsolving an optimal reduced solution
//! gives an optimal original solution. No presolver increases `nnz`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cost::CostModel;
use crate::lp::LpProblem;

pub mod activity;
mod rules;
mod stack;

pub use stack::{PostsolveError, PresolveStack, Reduction};

/// Bound comparison tolerance (scaled by `1 + |value|`).
pub const TOL: f64 = 1e-9;
/// Violation that must be exceeded before infeasibility is declared.
pub const INFEAS_TOL: f64 = 1e-6;
/// Smallest pivot magnitude accepted for substitution.
pub const PIVOT_MIN: f64 = 1e-7;

/// The twelve supported presolvers. Ids 3, 5 and 14 exist in the numbering
/// but are not implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresolverId {
    MakeFixed,
    TestRedundant,
    DupCol,
    DupRow,
    ImpliedFree,
    SlackDoubleton,
    TightenAction,
    RemoveDual,
    Doubleton,
    Tripleton,
    Forcing,
    SlackSingleton,
}

/// Highest id in the numbering, implemented or not.
pub const MAX_ID: u8 = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresolverIdError {
    #[error("unsupported presolver id {0}")]
    Unsupported(u8),
    #[error("presolver id {0} out of range 0..=14")]
    OutOfRange(i64),
    #[error("unknown presolver name {0:?}")]
    UnknownName(String),
}

impl PresolverId {
    /// Supported presolvers in ascending id order (the default routine order).
    pub const ALL: [PresolverId; 12] = [
        PresolverId::MakeFixed,
        PresolverId::TestRedundant,
        PresolverId::DupCol,
        PresolverId::DupRow,
        PresolverId::ImpliedFree,
        PresolverId::SlackDoubleton,
        PresolverId::TightenAction,
        PresolverId::RemoveDual,
        PresolverId::Doubleton,
        PresolverId::Tripleton,
        PresolverId::Forcing,
        PresolverId::SlackSingleton,
    ];

    pub fn id(self) -> u8 {
        match self {
            PresolverId::MakeFixed => 0,
            PresolverId::TestRedundant => 1,
            PresolverId::DupCol => 2,
            PresolverId::DupRow => 4,
            PresolverId::ImpliedFree => 6,
            PresolverId::SlackDoubleton => 7,
            PresolverId::TightenAction => 8,
            PresolverId::RemoveDual => 9,
            PresolverId::Doubleton => 10,
            PresolverId::Tripleton => 11,
            PresolverId::Forcing => 12,
            PresolverId::SlackSingleton => 13,
        }
    }

    pub fn from_id(id: u8) -> Result<Self, PresolverIdError> {
        match id {
            3 | 5 | 14 => Err(PresolverIdError::Unsupported(id)),
            _ => PresolverId::ALL
                .iter()
                .copied()
                .find(|p| p.id() == id)
                .ok_or(PresolverIdError::OutOfRange(id as i64)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PresolverId::MakeFixed => "make_fixed",
            PresolverId::TestRedundant => "test_redundant",
            PresolverId::DupCol => "dupcol",
            PresolverId::DupRow => "duprow",
            PresolverId::ImpliedFree => "implied_free",
            PresolverId::SlackDoubleton => "slack_doubleton",
            PresolverId::TightenAction => "tighten_action",
            PresolverId::RemoveDual => "remove_dual",
            PresolverId::Doubleton => "doubleton",
            PresolverId::Tripleton => "tripleton",
            PresolverId::Forcing => "forcing",
            PresolverId::SlackSingleton => "slack_singleton",
        }
    }

    /// Position in [`PresolverId::ALL`].
    pub fn index(self) -> usize {
        PresolverId::ALL.iter().position(|&p| p == self).unwrap()
    }
}

impl fmt::Display for PresolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresolverId {
    type Err = PresolverIdError;

    /// Accepts a name or a decimal id.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(n) = s.parse::<i64>() {
            if !(0..=MAX_ID as i64).contains(&n) {
                return Err(PresolverIdError::OutOfRange(n));
            }
            return PresolverId::from_id(n as u8);
        }
        PresolverId::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| PresolverIdError::UnknownName(s.to_string()))
    }
}

impl Serialize for PresolverId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for PresolverId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Id(i64),
            Name(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Id(n) => n.to_string().parse(),
            Raw::Name(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Deterministic work counters of one presolver call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Work {
    /// Matrix entries, rows and columns inspected.
    pub scanned: u64,
    /// Reductions applied.
    pub applied: u64,
}

impl std::ops::AddAssign for Work {
    fn add_assign(&mut self, rhs: Self) {
        self.scanned += rhs.scanned;
        self.applied += rhs.applied;
    }
}

/// Statistics of one presolver call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub presolver: PresolverId,
    pub nnz_before: usize,
    pub nnz_after: usize,
    pub rows_removed: usize,
    pub cols_removed: usize,
    pub work: Work,
    pub seconds: f64,
}

impl StepStats {
    /// True when the call changed the problem size.
    pub fn reduced(&self) -> bool {
        self.nnz_after < self.nnz_before || self.rows_removed > 0 || self.cols_removed > 0
    }

    pub fn cost(&self, model: &CostModel) -> f64 {
        model.presolve_cost(&self.work, self.seconds)
    }
}

/// A presolver proved the problem infeasible at `row`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{presolver} detected infeasibility at row {row}")]
pub struct InfeasibleDetected {
    pub presolver: PresolverId,
    pub row: usize,
    /// Statistics up to the point of detection.
    pub stats: StepStats,
}

/// Runs one pass of `id` on `lp`, recording reductions on `stack`.
pub fn apply(
    id: PresolverId,
    lp: &mut LpProblem,
    stack: &mut PresolveStack,
) -> Result<StepStats, InfeasibleDetected> {
    let start = Instant::now();
    let nnz_before = lp.nnz();
    let rows_before = lp.num_rows();
    let cols_before = lp.num_cols();
    let mut pass = rules::Pass::new(lp, stack);
    let outcome = pass.run(id);
    let work = pass.work;
    let stats = StepStats {
        presolver: id,
        nnz_before,
        nnz_after: lp.nnz(),
        rows_removed: rows_before - lp.num_rows(),
        cols_removed: cols_before - lp.num_cols(),
        work,
        seconds: start.elapsed().as_secs_f64(),
    };
    debug_assert!(stats.nnz_after <= stats.nnz_before);
    match outcome {
        Ok(()) => Ok(stats),
        Err(row) => Err(InfeasibleDetected {
            presolver: id,
            row,
            stats,
        }),
    }
}

/// Runs `ids` in order, stopping at the first infeasibility.
pub fn apply_sequence(
    ids: &[PresolverId],
    lp: &mut LpProblem,
    stack: &mut PresolveStack,
) -> Result<Vec<StepStats>, (Vec<StepStats>, InfeasibleDetected)> {
    let mut out = Vec::with_capacity(ids.len());
    for &id in ids {
        match apply(id, lp, stack) {
            Ok(s) => out.push(s),
            Err(e) => return Err((out, e)),
        }
    }
    Ok(out)
}
