//! Reduction records and postsolve.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{Entry, LpProblem};

/// Snapshot of a row taken when a reduction depends on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSnapshot {
    pub row: usize,
    pub lower: f64,
    pub upper: f64,
    /// Entries other than the eliminated column.
    pub others: Vec<(usize, f64)>,
}

impl RowSnapshot {
    pub(crate) fn take(lp: &LpProblem, row: usize, skip: usize) -> Self {
        RowSnapshot {
            row,
            lower: lp.row_lower(row),
            upper: lp.row_upper(row),
            others: lp
                .row(row)
                .iter()
                .filter(|e| e.index != skip)
                .map(|e| (e.index, e.value))
                .collect(),
        }
    }

    fn rest(&self, x: &[f64]) -> f64 {
        self.others.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// One recorded reduction. Indices refer to the problem's original
/// (tombstoned) index space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Reduction {
    /// `x_col` fixed and its column removed.
    FixedVar { col: usize, value: f64 },
    RemovedRow { row: usize },
    /// `x_col = (rhs − Σ others)/pivot` from an equality row.
    Substituted {
        col: usize,
        pivot: f64,
        rhs: f64,
        others: Vec<(usize, f64)>,
    },
    /// Column `removed` merged into `kept`, which now holds
    /// `x_kept + alpha·x_removed`.
    MergedColumns {
        kept: usize,
        removed: usize,
        alpha: f64,
        kept_bounds: (f64, f64),
        removed_bounds: (f64, f64),
    },
    /// Zero-cost singleton column whose range moved into its row.
    SlackSingleton {
        col: usize,
        coef: f64,
        bounds: (f64, f64),
        row: RowSnapshot,
    },
    /// Zero-cost column that relaxes all of its rows in direction `dir`
    /// with an infinite bound there; the rows were dropped with it.
    AbsorbedRows {
        col: usize,
        dir: f64,
        bounds: (f64, f64),
        coefs: Vec<f64>,
        rows: Vec<RowSnapshot>,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PostsolveError {
    #[error("primal has {got} entries, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// Ordered reductions plus what postsolve needs to report the objective of
/// the original problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresolveStack {
    reductions: Vec<Reduction>,
    num_cols: usize,
    original_obj: Vec<f64>,
    original_offset: f64,
}

/// Point of `[lo, hi]` closest to zero; `lo` when the interval is empty.
fn pick(lo: f64, hi: f64) -> f64 {
    if lo > hi {
        if lo.is_finite() {
            lo
        } else {
            hi
        }
    } else {
        0.0f64.clamp(lo, hi)
    }
}

impl PresolveStack {
    pub fn new(original: &LpProblem) -> Self {
        PresolveStack {
            reductions: Vec::new(),
            num_cols: original.col_capacity(),
            original_obj: original.obj().to_vec(),
            original_offset: original.obj_offset(),
        }
    }

    pub fn push(&mut self, r: Reduction) {
        self.reductions.push(r);
    }

    pub fn len(&self) -> usize {
        self.reductions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reductions.is_empty()
    }

    pub fn reductions(&self) -> &[Reduction] {
        &self.reductions
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    /// Objective of the original problem at `x`.
    pub fn original_objective(&self, x: &[f64]) -> f64 {
        self.original_offset
            + self
                .original_obj
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }

    /// Undoes the reductions in reverse order. `x` holds the reduced
    /// solution in the original index space (values of removed columns are
    /// ignored). Returns the original primal and its original objective.
    pub fn postsolve(&self, x: &[f64]) -> Result<(Vec<f64>, f64), PostsolveError> {
        if x.len() != self.num_cols {
            return Err(PostsolveError::DimensionMismatch {
                got: x.len(),
                expected: self.num_cols,
            });
        }
        let mut x = x.to_vec();
        for r in self.reductions.iter().rev() {
            match r {
                Reduction::FixedVar { col, value } => x[*col] = *value,
                Reduction::RemovedRow { .. } => {}
                Reduction::Substituted {
                    col,
                    pivot,
                    rhs,
                    others,
                } => {
                    let rest: f64 = others.iter().map(|&(j, a)| a * x[j]).sum();
                    x[*col] = (rhs - rest) / pivot;
                }
                Reduction::MergedColumns {
                    kept,
                    removed,
                    alpha,
                    kept_bounds: (l2, u2),
                    removed_bounds: (l1, u1),
                } => {
                    let v = x[*kept];
                    // x_removed ∈ [l1, u1] with v − alpha·x_removed ∈ [l2, u2]
                    let (a, b) = ((v - u2) / alpha, (v - l2) / alpha);
                    let (lo, hi) = if *alpha > 0.0 { (a, b) } else { (b, a) };
                    let x1 = pick(lo.max(*l1), hi.min(*u1));
                    x[*removed] = x1;
                    x[*kept] = (v - alpha * x1).clamp(*l2, *u2);
                }
                Reduction::SlackSingleton {
                    col,
                    coef,
                    bounds: (l, u),
                    row,
                } => {
                    let rest = row.rest(&x);
                    let (a, b) = ((row.lower - rest) / coef, (row.upper - rest) / coef);
                    let (lo, hi) = if *coef > 0.0 { (a, b) } else { (b, a) };
                    x[*col] = pick(lo.max(*l), hi.min(*u));
                }
                Reduction::AbsorbedRows {
                    col,
                    dir,
                    bounds: (l, u),
                    coefs,
                    rows,
                } => {
                    // Start at the finite bound opposite `dir` (or 0) and move
                    // in direction `dir` until every row is satisfied.
                    let mut v = if *dir > 0.0 {
                        if l.is_finite() {
                            *l
                        } else {
                            0.0f64.min(*u)
                        }
                    } else if u.is_finite() {
                        *u
                    } else {
                        0.0f64.max(*l)
                    };
                    for (snap, &a) in rows.iter().zip(coefs) {
                        let rest = snap.rest(&x);
                        // Sides that bind when moving in `dir`.
                        let need = if a * dir > 0.0 {
                            (snap.lower - rest) / a
                        } else {
                            (snap.upper - rest) / a
                        };
                        if need.is_finite() {
                            v = if *dir > 0.0 { v.max(need) } else { v.min(need) };
                        }
                    }
                    x[*col] = v;
                }
            }
        }
        let obj = self.original_objective(&x);
        Ok((x, obj))
    }
}

pub(crate) fn others_of(row: &[Entry], skip: usize) -> Vec<(usize, f64)> {
    row.iter()
        .filter(|e| e.index != skip)
        .map(|e| (e.index, e.value))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pick_prefers_zero() {
        assert_eq!(pick(-1.0, 2.0), 0.0);
        assert_eq!(pick(1.0, 2.0), 1.0);
        assert_eq!(pick(f64::NEG_INFINITY, -3.0), -3.0);
        assert_eq!(pick(2.0, 1.0), 2.0);
    }

    #[test]
    fn dimension_mismatch() {
        let mut lp = LpProblem::new("t");
        lp.add_col("x", 1.0, 0.0, 1.0).unwrap();
        let stack = PresolveStack::new(&lp);
        assert!(matches!(
            stack.postsolve(&[0.0, 1.0]),
            Err(PostsolveError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn substitution_undone() {
        let mut lp = LpProblem::new("t");
        lp.add_col("x", 1.0, 0.0, 10.0).unwrap();
        lp.add_col("y", 2.0, 0.0, 10.0).unwrap();
        let mut stack = PresolveStack::new(&lp);
        stack.push(Reduction::Substituted {
            col: 0,
            pivot: 2.0,
            rhs: 6.0,
            others: vec![(1, 1.0)],
        });
        let (x, obj) = stack.postsolve(&[99.0, 2.0]).unwrap();
        assert_eq!(x, vec![2.0, 2.0]);
        assert_eq!(obj, 6.0);
    }
}
