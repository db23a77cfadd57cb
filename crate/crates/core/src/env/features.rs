//! The 51-entry observation vector.
//!
//! | index | content                                              | divided by            |
//! |-------|------------------------------------------------------|-----------------------|
//! | 0–3   | equations with exactly 1/2/3/4 nonzeros              | equations             |
//! | 4     | equations holding an implied-free column singleton   | equations             |
//! | 5–8   | inequalities with exactly 1/2/3/4 nonzeros           | inequalities          |
//! | 9     | zero-cost columns with a relaxing direction          | variables             |
//! | 10–12 | equations, inequalities, variables                   | all constraints       |
//! | 13–16 | forcing at lower, forcing at upper, redundant, near-redundant rows | all constraints |
//! | 17    | nnz                                                  | constraints·variables |
//! | 18–35 | entries 0–17 minus their value at reset              |                       |
//! | 36–50 | executed count of presolver id 0..=14                | not normalized        |
//!
//! Every denominator is `max(count, 1)`.

use crate::lp::LpProblem;
use crate::presolve::activity::{
    classify_row, implied_free_singleton, is_tightenable, Activity, RowClass,
};
use crate::presolve::PresolverId;

pub const NUM_FEATURES: usize = 51;
/// Entries describing the current problem.
pub const NUM_STATIC: usize = 18;
/// First history-of-actions entry.
pub const ACTION_HISTORY: usize = 36;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "eq_deg1",
    "eq_deg2",
    "eq_deg3",
    "eq_deg4",
    "eq_implied_free",
    "ineq_deg1",
    "ineq_deg2",
    "ineq_deg3",
    "ineq_deg4",
    "tighten",
    "num_equations",
    "num_inequalities",
    "num_variables",
    "forcing_lower",
    "forcing_upper",
    "redundant",
    "near_redundant",
    "nnz",
    "d_eq_deg1",
    "d_eq_deg2",
    "d_eq_deg3",
    "d_eq_deg4",
    "d_eq_implied_free",
    "d_ineq_deg1",
    "d_ineq_deg2",
    "d_ineq_deg3",
    "d_ineq_deg4",
    "d_tighten",
    "d_num_equations",
    "d_num_inequalities",
    "d_num_variables",
    "d_forcing_lower",
    "d_forcing_upper",
    "d_redundant",
    "d_near_redundant",
    "d_nnz",
    "exec_make_fixed",
    "exec_test_redundant",
    "exec_dupcol",
    "exec_unsupported_3",
    "exec_duprow",
    "exec_unsupported_5",
    "exec_implied_free",
    "exec_slack_doubleton",
    "exec_tighten_action",
    "exec_remove_dual",
    "exec_doubleton",
    "exec_tripleton",
    "exec_forcing",
    "exec_slack_singleton",
    "exec_unsupported_14",
];

/// Raw counts behind entries 0–17, before normalization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub eq_deg: [usize; 4],
    pub eq_implied_free: usize,
    pub ineq_deg: [usize; 4],
    pub tighten: usize,
    pub equations: usize,
    pub inequalities: usize,
    pub variables: usize,
    pub forcing_lower: usize,
    pub forcing_upper: usize,
    pub redundant: usize,
    pub near_redundant: usize,
    pub nnz: usize,
}

pub fn counts(lp: &LpProblem) -> Counts {
    let mut c = Counts {
        nnz: lp.nnz(),
        variables: lp.num_cols(),
        ..Counts::default()
    };
    let mut implied_rows = vec![false; lp.row_capacity()];
    for j in lp.active_cols() {
        if let Some((i, _)) = implied_free_singleton(lp, j) {
            implied_rows[i] = true;
        }
        if is_tightenable(lp, j) {
            c.tighten += 1;
        }
    }
    for i in lp.active_rows() {
        let len = lp.row(i).len();
        let eq = lp.is_equality(i);
        if eq {
            c.equations += 1;
            if (1..=4).contains(&len) {
                c.eq_deg[len - 1] += 1;
            }
            if implied_rows[i] {
                c.eq_implied_free += 1;
            }
        } else {
            c.inequalities += 1;
            if (1..=4).contains(&len) {
                c.ineq_deg[len - 1] += 1;
            }
        }
        let act = Activity::of_row(lp, i);
        match classify_row(lp, i, &act) {
            RowClass::ForcingAtLower => c.forcing_lower += 1,
            RowClass::ForcingAtUpper => c.forcing_upper += 1,
            RowClass::Redundant => c.redundant += 1,
            RowClass::NearRedundant => c.near_redundant += 1,
            RowClass::Infeasible | RowClass::Plain => {}
        }
    }
    c
}

fn ratio(num: usize, den: usize) -> f64 {
    num as f64 / den.max(1) as f64
}

/// Entries 0–17 of the observation.
pub fn static_features(lp: &LpProblem) -> [f64; NUM_STATIC] {
    let c = counts(lp);
    let eqs = c.equations;
    let ineqs = c.inequalities;
    let rows = eqs + ineqs;
    let mut f = [0.0; NUM_STATIC];
    for k in 0..4 {
        f[k] = ratio(c.eq_deg[k], eqs);
        f[5 + k] = ratio(c.ineq_deg[k], ineqs);
    }
    f[4] = ratio(c.eq_implied_free, eqs);
    f[9] = ratio(c.tighten, c.variables);
    f[10] = ratio(eqs, rows);
    f[11] = ratio(ineqs, rows);
    f[12] = ratio(c.variables, rows);
    f[13] = ratio(c.forcing_lower, rows);
    f[14] = ratio(c.forcing_upper, rows);
    f[15] = ratio(c.redundant, rows);
    f[16] = ratio(c.near_redundant, rows);
    f[17] = ratio(c.nnz, rows.max(1) * c.variables.max(1));
    f
}

/// Per-episode history: the static entries at reset and the number of times
/// each presolver id ran.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub at_reset: [f64; NUM_STATIC],
    pub executed: [u32; 15],
}

impl History {
    pub fn new(lp: &LpProblem) -> Self {
        History {
            at_reset: static_features(lp),
            executed: [0; 15],
        }
    }

    pub fn record(&mut self, p: PresolverId) {
        self.executed[p.id() as usize] += 1;
    }
}

/// The full observation. Pure in `(lp, history)`.
pub fn extract(lp: &LpProblem, history: &History) -> Vec<f64> {
    let now = static_features(lp);
    let mut out = Vec::with_capacity(NUM_FEATURES);
    out.extend_from_slice(&now);
    out.extend(now.iter().zip(&history.at_reset).map(|(a, b)| a - b));
    out.extend(history.executed.iter().map(|&n| n as f64));
    debug_assert_eq!(out.len(), NUM_FEATURES);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_free_variable() {
        let mut lp = LpProblem::new("t");
        lp.add_col("x", 0.0, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let f = extract(&lp, &History::new(&lp));
        assert_eq!(f.len(), NUM_FEATURES);
        assert!(f[..9].iter().all(|&v| v == 0.0));
        assert_eq!(f[12], 1.0);
        assert_eq!(f[9], 1.0);
    }

    #[test]
    fn equation_degrees() {
        let mut lp = LpProblem::new("t");
        for j in 0..6 {
            lp.add_col(format!("x{j}"), 1.0, 0.0, 1.0).unwrap();
        }
        for i in 0..3 {
            lp.add_row(format!("r{i}"), 1.0, 1.0, &[(2 * i, 1.0), (2 * i + 1, 1.0)])
                .unwrap();
        }
        let f = extract(&lp, &History::new(&lp));
        assert_eq!(f[1], 1.0);
        assert_eq!(f[17], 6.0 / 18.0);
        assert_eq!(f[10], 1.0);
        assert_eq!(f[12], 2.0);
    }

    #[test]
    fn names_match_ids() {
        for p in PresolverId::ALL {
            assert_eq!(
                FEATURE_NAMES[ACTION_HISTORY + p.id() as usize],
                format!("exec_{}", p.name())
            );
        }
    }
}
