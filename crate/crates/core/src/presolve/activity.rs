//! Row activity bounds and the detection predicates shared by the presolvers
//! and the feature extractor.

use crate::lp::LpProblem;

use super::{INFEAS_TOL, PIVOT_MIN, TOL};

/// Minimum and maximum of `a_iᵀx` over the column box, tracked as a finite
/// part plus a count of infinite contributions so that removing one term
/// never needs `∞ − ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activity {
    pub min_fin: f64,
    pub min_inf: usize,
    pub max_fin: f64,
    pub max_inf: usize,
}

/// `(min, max)` of `a·x` for `x ∈ [l, u]`.
pub fn term_range(a: f64, l: f64, u: f64) -> (f64, f64) {
    if a > 0.0 {
        (a * l, a * u)
    } else {
        (a * u, a * l)
    }
}

impl Activity {
    pub fn of_row(lp: &LpProblem, i: usize) -> Self {
        let mut act = Activity {
            min_fin: 0.0,
            min_inf: 0,
            max_fin: 0.0,
            max_inf: 0,
        };
        for e in lp.row(i) {
            let (lo, hi) = term_range(e.value, lp.col_lower(e.index), lp.col_upper(e.index));
            if lo.is_finite() {
                act.min_fin += lo;
            } else {
                act.min_inf += 1;
            }
            if hi.is_finite() {
                act.max_fin += hi;
            } else {
                act.max_inf += 1;
            }
        }
        act
    }

    /// `L_i`.
    pub fn min(&self) -> f64 {
        if self.min_inf > 0 {
            f64::NEG_INFINITY
        } else {
            self.min_fin
        }
    }

    /// `U_i`.
    pub fn max(&self) -> f64 {
        if self.max_inf > 0 {
            f64::INFINITY
        } else {
            self.max_fin
        }
    }

    /// Minimum activity of the row without the term `a·x`, `x ∈ [l, u]`.
    pub fn min_without(&self, a: f64, l: f64, u: f64) -> f64 {
        let (lo, _) = term_range(a, l, u);
        if lo.is_finite() {
            if self.min_inf > 0 {
                f64::NEG_INFINITY
            } else {
                self.min_fin - lo
            }
        } else if self.min_inf == 1 {
            self.min_fin
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Maximum activity of the row without the term `a·x`, `x ∈ [l, u]`.
    pub fn max_without(&self, a: f64, l: f64, u: f64) -> f64 {
        let (_, hi) = term_range(a, l, u);
        if hi.is_finite() {
            if self.max_inf > 0 {
                f64::INFINITY
            } else {
                self.max_fin - hi
            }
        } else if self.max_inf == 1 {
            self.max_fin
        } else {
            f64::INFINITY
        }
    }
}

pub(crate) fn scaled_tol(tol: f64, reference: f64) -> f64 {
    if reference.is_finite() {
        tol * (1.0 + reference.abs())
    } else {
        tol
    }
}

/// How a row relates to the activity range implied by the column bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowClass {
    /// `L_i > b̄_i` or `U_i < b̲_i` beyond tolerance.
    Infeasible,
    /// `[L_i, U_i] ⊆ [b̲_i, b̄_i]`.
    Redundant,
    /// `U_i = b̲_i`: every variable is forced to its activity-maximizing bound.
    ForcingAtLower,
    /// `L_i = b̄_i`: every variable is forced to its activity-minimizing bound.
    ForcingAtUpper,
    /// Not redundant, but the bound overhang is within 10% of `U_i − L_i`.
    NearRedundant,
    Plain,
}

pub fn classify_row(lp: &LpProblem, i: usize, act: &Activity) -> RowClass {
    let (bl, bu) = (lp.row_lower(i), lp.row_upper(i));
    let (l, u) = (act.min(), act.max());
    if l.is_finite() && bu.is_finite() && l - bu > scaled_tol(INFEAS_TOL, bu) {
        return RowClass::Infeasible;
    }
    if u.is_finite() && bl.is_finite() && bl - u > scaled_tol(INFEAS_TOL, bl) {
        return RowClass::Infeasible;
    }
    let lower_ok = bl == f64::NEG_INFINITY || (l.is_finite() && l >= bl - scaled_tol(TOL, bl));
    let upper_ok = bu == f64::INFINITY || (u.is_finite() && u <= bu + scaled_tol(TOL, bu));
    if lower_ok && upper_ok {
        return RowClass::Redundant;
    }
    if l.is_finite() && bu.is_finite() && (l - bu).abs() <= scaled_tol(TOL, bu) {
        return RowClass::ForcingAtUpper;
    }
    if u.is_finite() && bl.is_finite() && (u - bl).abs() <= scaled_tol(TOL, bl) {
        return RowClass::ForcingAtLower;
    }
    if l.is_finite() && u.is_finite() {
        let over = (bl - l).max(0.0) + (u - bu).max(0.0);
        if over <= 0.1 * (u - l) {
            return RowClass::NearRedundant;
        }
    }
    RowClass::Plain
}

/// Range of `x_k` implied by row `i` (assumed `b̲ ≤ a_iᵀx ≤ b̄`) and the bounds
/// of the other variables in the row.
pub fn implied_range(lp: &LpProblem, i: usize, act: &Activity, k: usize, a: f64) -> (f64, f64) {
    let (l, u) = (lp.col_lower(k), lp.col_upper(k));
    let rest_min = act.min_without(a, l, u);
    let rest_max = act.max_without(a, l, u);
    let (bl, bu) = (lp.row_lower(i), lp.row_upper(i));
    // a·x_k ∈ [b̲ − rest_max, b̄ − rest_min]
    let lo = if bl.is_finite() && rest_max.is_finite() {
        bl - rest_max
    } else {
        f64::NEG_INFINITY
    };
    let hi = if bu.is_finite() && rest_min.is_finite() {
        bu - rest_min
    } else {
        f64::INFINITY
    };
    if a > 0.0 {
        (lo / a, hi / a)
    } else {
        (hi / a, lo / a)
    }
}

/// True when the bounds of `x_k` are implied by equality row `i`.
pub fn is_implied_free_in(lp: &LpProblem, i: usize, act: &Activity, k: usize, a: f64) -> bool {
    let (il, iu) = implied_range(lp, i, act, k, a);
    let (l, u) = (lp.col_lower(k), lp.col_upper(k));
    let lower_ok = l == f64::NEG_INFINITY || (il.is_finite() && il >= l - scaled_tol(TOL, l));
    let upper_ok = u == f64::INFINITY || (iu.is_finite() && iu <= u + scaled_tol(TOL, u));
    lower_ok && upper_ok
}

/// Column singleton of equality row `i` whose bounds are implied by that row.
pub fn implied_free_singleton(lp: &LpProblem, k: usize) -> Option<(usize, f64)> {
    let col = lp.col(k);
    if col.len() != 1 {
        return None;
    }
    let (i, a) = (col[0].index, col[0].value);
    if !lp.is_equality(i) || a.abs() < PIVOT_MIN {
        return None;
    }
    let act = Activity::of_row(lp, i);
    is_implied_free_in(lp, i, &act, k, a).then_some((i, a))
}

/// Direction in which `x_j` can move without ever making a row less
/// satisfied: `Some(1.0)` for increasing, `Some(-1.0)` for decreasing.
/// Empty columns report increasing when both work and the upper bound is
/// finite, decreasing otherwise.
pub fn relaxing_direction(lp: &LpProblem, j: usize) -> Option<f64> {
    let mut up = true;
    let mut down = true;
    for e in lp.col(j) {
        let (bl, bu) = (lp.row_lower(e.index), lp.row_upper(e.index));
        if e.value > 0.0 {
            // Increasing raises activity: harmless only without an upper side.
            up &= bu == f64::INFINITY;
            down &= bl == f64::NEG_INFINITY;
        } else {
            up &= bl == f64::NEG_INFINITY;
            down &= bu == f64::INFINITY;
        }
        if !up && !down {
            return None;
        }
    }
    match (up, down) {
        (true, true) => {
            if lp.col_lower(j).is_finite() || !lp.col_upper(j).is_finite() {
                Some(-1.0)
            } else {
                Some(1.0)
            }
        }
        (true, false) => Some(1.0),
        (false, true) => Some(-1.0),
        (false, false) => None,
    }
}

/// Zero-cost column that can move in a relaxing direction (presolver 8's
/// activation condition).
pub fn is_tightenable(lp: &LpProblem, j: usize) -> bool {
    lp.cost(j) == 0.0 && relaxing_direction(lp, j).is_some()
}
