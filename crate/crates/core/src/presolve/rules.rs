//! The presolver passes. Each scans rows or columns once in ascending index
//! order and applies every reduction it finds on the way.

use std::collections::BTreeMap;

use crate::lp::{LpProblem, ZERO_TOL};

use super::activity::{
    implied_free_singleton, is_implied_free_in, relaxing_direction, scaled_tol, term_range,
    Activity, RowClass,
};
use super::stack::{others_of, Reduction, RowSnapshot};
use super::{PresolveStack, PresolverId, Work, INFEAS_TOL, PIVOT_MIN, TOL};

/// Err carries the row that proved infeasibility.
type PassResult = Result<(), usize>;

pub(crate) struct Pass<'a> {
    lp: &'a mut LpProblem,
    stack: &'a mut PresolveStack,
    pub work: Work,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= scaled_tol(TOL, a.abs().max(b.abs()))
}

impl<'a> Pass<'a> {
    pub fn new(lp: &'a mut LpProblem, stack: &'a mut PresolveStack) -> Self {
        Pass {
            lp,
            stack,
            work: Work::default(),
        }
    }

    pub fn run(&mut self, id: PresolverId) -> PassResult {
        match id {
            PresolverId::MakeFixed => self.make_fixed(),
            PresolverId::TestRedundant => self.test_redundant(),
            PresolverId::DupCol => self.dupcol(),
            PresolverId::DupRow => self.duprow(),
            PresolverId::ImpliedFree => self.implied_free(),
            PresolverId::SlackDoubleton => self.slack_doubleton(),
            PresolverId::TightenAction => self.tighten_action(),
            PresolverId::RemoveDual => self.remove_dual(),
            PresolverId::Doubleton => self.doubleton(),
            PresolverId::Tripleton => self.tripleton(),
            PresolverId::Forcing => self.forcing(),
            PresolverId::SlackSingleton => self.slack_singleton(),
        }
    }

    fn rows(&self) -> Vec<usize> {
        self.lp.active_rows().collect()
    }

    fn cols(&self) -> Vec<usize> {
        self.lp.active_cols().collect()
    }

    fn fix(&mut self, j: usize, value: f64) {
        self.work.scanned += self.lp.col(j).len() as u64;
        self.work.applied += 1;
        self.stack.push(Reduction::FixedVar { col: j, value });
        self.lp.remove_column(j, value).expect("active column");
    }

    fn drop_row(&mut self, i: usize) {
        self.work.scanned += self.lp.row(i).len() as u64;
        self.work.applied += 1;
        self.stack.push(Reduction::RemovedRow { row: i });
        self.lp.remove_row(i).expect("active row");
    }

    /// Intersects the bounds of `x_j` with `[l, u]`. Gaps within tolerance
    /// collapse to a point; larger gaps are infeasible at `row`.
    fn tighten_col(&mut self, j: usize, l: f64, u: f64, row: usize) -> Result<bool, usize> {
        let (ol, ou) = (self.lp.col_lower(j), self.lp.col_upper(j));
        let mut nl = if l > ol + scaled_tol(TOL, ol) { l } else { ol };
        let mut nu = if u < ou - scaled_tol(TOL, ou) { u } else { ou };
        if nl > nu {
            let gap = nl - nu;
            if gap > scaled_tol(INFEAS_TOL, nl.abs().max(nu.abs())) {
                return Err(row);
            }
            // Keep whichever original bound lies inside the collapsed point.
            let mid = if nl == ol { ol } else if nu == ou { ou } else { 0.5 * (nl + nu) };
            nl = mid;
            nu = mid;
        }
        if nl == ol && nu == ou {
            return Ok(false);
        }
        self.lp.set_col_bounds(j, nl, nu).expect("ordered bounds");
        Ok(true)
    }

    /// Sets row bounds after intersecting, with the same tolerance policy.
    fn set_row_checked(&mut self, i: usize, l: f64, u: f64) -> PassResult {
        let (mut l, mut u) = (l, u);
        if l > u {
            if l - u > scaled_tol(INFEAS_TOL, l.abs().max(u.abs())) {
                return Err(i);
            }
            let mid = 0.5 * (l + u);
            l = mid;
            u = mid;
        }
        self.lp.set_row_bounds(i, l, u).expect("ordered bounds");
        Ok(())
    }

    // ---- 0 ----

    fn make_fixed(&mut self) -> PassResult {
        for j in self.cols() {
            self.work.scanned += 1;
            let (l, u) = (self.lp.col_lower(j), self.lp.col_upper(j));
            if l.is_finite() && u - l <= scaled_tol(TOL, l) {
                self.fix(j, l);
            }
        }
        Ok(())
    }

    // ---- 1 ----

    fn test_redundant(&mut self) -> PassResult {
        for i in self.rows() {
            if !self.lp.is_row_active(i) {
                continue;
            }
            self.work.scanned += 1 + self.lp.row(i).len() as u64;
            let act = Activity::of_row(self.lp, i);
            match super::activity::classify_row(self.lp, i, &act) {
                RowClass::Infeasible => return Err(i),
                RowClass::Redundant => {
                    self.drop_row(i);
                    continue;
                }
                _ => {}
            }
            // Single-row bound propagation.
            let (bl, bu) = (self.lp.row_lower(i), self.lp.row_upper(i));
            let entries: Vec<(usize, f64)> = others_of(self.lp.row(i), usize::MAX);
            let mut tightened = false;
            for (j, a) in entries {
                let (l, u) = (self.lp.col_lower(j), self.lp.col_upper(j));
                let rest_min = act.min_without(a, l, u);
                let rest_max = act.max_without(a, l, u);
                // a·x_j ≤ b̄ − rest_min and a·x_j ≥ b̲ − rest_max
                let hi = if bu.is_finite() && rest_min.is_finite() {
                    (bu - rest_min) / a
                } else {
                    f64::NAN
                };
                let lo = if bl.is_finite() && rest_max.is_finite() {
                    (bl - rest_max) / a
                } else {
                    f64::NAN
                };
                let (new_l, new_u) = if a > 0.0 { (lo, hi) } else { (hi, lo) };
                let new_l = if new_l.is_nan() { f64::NEG_INFINITY } else { new_l };
                let new_u = if new_u.is_nan() { f64::INFINITY } else { new_u };
                // Only accept changes that matter; this also keeps repeated
                // passes from creeping by rounding.
                let gain_l = new_l > l + 1e-7 * (1.0 + l.abs().min(new_l.abs()));
                let gain_u = new_u < u - 1e-7 * (1.0 + u.abs().min(new_u.abs()));
                if gain_l || gain_u {
                    let tl = if gain_l { new_l } else { l };
                    let tu = if gain_u { new_u } else { u };
                    if self.tighten_col(j, tl, tu, i)? {
                        tightened = true;
                    }
                }
            }
            if tightened {
                self.work.applied += 1;
                let act = Activity::of_row(self.lp, i);
                if super::activity::classify_row(self.lp, i, &act) == RowClass::Redundant {
                    self.drop_row(i);
                }
            }
        }
        Ok(())
    }

    // ---- 2 ----

    fn dupcol(&mut self) -> PassResult {
        let mut buckets: BTreeMap<Vec<(usize, i64)>, Vec<usize>> = BTreeMap::new();
        for j in self.cols() {
            let col = self.lp.col(j);
            self.work.scanned += 1 + col.len() as u64;
            if col.is_empty() {
                continue;
            }
            buckets.entry(pattern_key(col)).or_default().push(j);
        }
        for (_, members) in buckets {
            if members.len() < 2 {
                continue;
            }
            // Ascending: later columns merge into the earliest survivor.
            let mut survivors: Vec<usize> = Vec::new();
            for q in members {
                let mut done = false;
                for &p in &survivors {
                    if !self.lp.is_col_active(p) || !self.lp.is_col_active(q) {
                        continue;
                    }
                    self.work.scanned += self.lp.col(q).len() as u64;
                    let Some(alpha) = parallel_ratio(self.lp.col(q), self.lp.col(p)) else {
                        continue;
                    };
                    done = self.dupcol_pair(p, q, alpha);
                    if done {
                        break;
                    }
                }
                if !done && self.lp.is_col_active(q) {
                    survivors.push(q);
                }
            }
        }
        Ok(())
    }

    /// `col(q) = alpha·col(p)`. Returns true when `q` was removed.
    fn dupcol_pair(&mut self, p: usize, q: usize, alpha: f64) -> bool {
        let (cp, cq) = (self.lp.cost(p), self.lp.cost(q));
        let d = cq - alpha * cp;
        let (lp_, up) = (self.lp.col_lower(p), self.lp.col_upper(p));
        let (lq, uq) = (self.lp.col_lower(q), self.lp.col_upper(q));
        if d.abs() <= scaled_tol(TOL, cq) {
            // x_p' = x_p + alpha·x_q
            let (tmin, tmax) = term_range(alpha, lq, uq);
            let nl = lp_ + tmin;
            let nu = up + tmax;
            self.stack.push(Reduction::MergedColumns {
                kept: p,
                removed: q,
                alpha,
                kept_bounds: (lp_, up),
                removed_bounds: (lq, uq),
            });
            self.lp.set_col_bounds(p, nl, nu).expect("widened bounds");
            self.lp.drop_column(q).expect("active column");
            self.work.applied += 1;
            return true;
        }
        // Moving x_q by δ and x_p by −alpha·δ keeps Ax and changes the cost by d·δ.
        if d > 0.0 {
            // Decrease x_q: x_p grows when alpha > 0.
            let partner_free = if alpha > 0.0 {
                up == f64::INFINITY
            } else {
                lp_ == f64::NEG_INFINITY
            };
            if partner_free && lq.is_finite() {
                self.fix(q, lq);
                return true;
            }
        } else {
            let partner_free = if alpha > 0.0 {
                lp_ == f64::NEG_INFINITY
            } else {
                up == f64::INFINITY
            };
            if partner_free && uq.is_finite() {
                self.fix(q, uq);
                return true;
            }
        }
        false
    }

    // ---- 4 ----

    fn duprow(&mut self) -> PassResult {
        let mut buckets: BTreeMap<Vec<(usize, i64)>, Vec<usize>> = BTreeMap::new();
        for i in self.rows() {
            let row = self.lp.row(i);
            self.work.scanned += 1 + row.len() as u64;
            if row.is_empty() {
                continue;
            }
            buckets.entry(pattern_key(row)).or_default().push(i);
        }
        for (_, members) in buckets {
            if members.len() < 2 {
                continue;
            }
            let mut survivors: Vec<usize> = Vec::new();
            for k in members {
                let mut merged = false;
                for &i in &survivors {
                    self.work.scanned += self.lp.row(k).len() as u64;
                    let Some(alpha) = parallel_ratio(self.lp.row(k), self.lp.row(i)) else {
                        continue;
                    };
                    // row_k = alpha·row_i, so b̲_k ≤ alpha·a_iᵀx ≤ b̄_k.
                    let (kl, ku) = (self.lp.row_lower(k), self.lp.row_upper(k));
                    let (sl, su) = if alpha > 0.0 {
                        (kl / alpha, ku / alpha)
                    } else {
                        (ku / alpha, kl / alpha)
                    };
                    let (il, iu) = (self.lp.row_lower(i), self.lp.row_upper(i));
                    let mut nl = il.max(sl);
                    let mut nu = iu.min(su);
                    // Snap to an existing side when within tolerance so that
                    // scaled equalities stay equalities.
                    if nl > nu && close(nl, nu) {
                        nu = nl;
                    }
                    if nl.is_finite() && nu.is_finite() && nl < nu && close(nl, nu) {
                        nl = nu;
                    }
                    self.set_row_checked(i, nl, nu)?;
                    self.drop_row(k);
                    merged = true;
                    break;
                }
                if !merged {
                    survivors.push(k);
                }
            }
        }
        Ok(())
    }

    // ---- 6 ----

    fn implied_free(&mut self) -> PassResult {
        for k in self.cols() {
            if !self.lp.is_col_active(k) {
                continue;
            }
            self.work.scanned += 1;
            let Some((i, a)) = implied_free_singleton(self.lp, k) else {
                continue;
            };
            self.work.scanned += self.lp.row(i).len() as u64;
            debug_assert!((self.lp.coef(i, k) - a).abs() == 0.0);
            self.substitute(i, k);
            self.lp.remove_row(i).expect("active row");
            self.lp.drop_column(k).expect("active column");
        }
        Ok(())
    }

    // ---- 7 ----

    fn slack_doubleton(&mut self) -> PassResult {
        for i in self.rows() {
            if !self.lp.is_row_active(i) {
                continue;
            }
            self.work.scanned += 1;
            if self.lp.row(i).len() != 1 {
                continue;
            }
            let e = self.lp.row(i)[0].clone();
            let (j, a) = (e.index, e.value);
            let (bl, bu) = (self.lp.row_lower(i), self.lp.row_upper(i));
            let (l, u) = if a > 0.0 {
                (bl / a, bu / a)
            } else {
                (bu / a, bl / a)
            };
            self.tighten_col(j, l, u, i)?;
            self.drop_row(i);
        }
        Ok(())
    }

    // ---- 8 ----

    fn tighten_action(&mut self) -> PassResult {
        for j in self.cols() {
            if !self.lp.is_col_active(j) {
                continue;
            }
            self.work.scanned += 1 + self.lp.col(j).len() as u64;
            if self.lp.cost(j) != 0.0 {
                continue;
            }
            let Some(dir) = relaxing_direction(self.lp, j) else {
                continue;
            };
            let (l, u) = (self.lp.col_lower(j), self.lp.col_upper(j));
            let target = if dir > 0.0 { u } else { l };
            if target.is_finite() {
                self.fix(j, target);
                continue;
            }
            if self.lp.col(j).is_empty() {
                // Free empty column: any finite value in the box.
                let v = 0.0f64.clamp(l, u);
                self.fix(j, v);
                continue;
            }
            // Unbounded in the relaxing direction: every row containing x_j
            // can always be satisfied, so the rows leave with the column.
            let entries = self.lp.col(j).to_vec();
            let rows: Vec<RowSnapshot> = entries
                .iter()
                .map(|e| RowSnapshot::take(self.lp, e.index, j))
                .collect();
            let removed: usize = rows.iter().map(|r| r.others.len()).sum();
            self.work.scanned += removed as u64;
            self.stack.push(Reduction::AbsorbedRows {
                col: j,
                dir,
                bounds: (l, u),
                coefs: entries.iter().map(|e| e.value).collect(),
                rows,
            });
            for e in &entries {
                self.lp.remove_row(e.index).expect("active row");
            }
            self.lp.drop_column(j).expect("active column");
            self.work.applied += 1;
        }
        Ok(())
    }

    // ---- 9 ----

    fn remove_dual(&mut self) -> PassResult {
        for j in self.cols() {
            if !self.lp.is_col_active(j) {
                continue;
            }
            self.work.scanned += 1 + self.lp.col(j).len() as u64;
            let c = self.lp.cost(j);
            if c == 0.0 {
                continue;
            }
            // Moving against the cost gradient must relax every row.
            let want = if c > 0.0 { -1.0 } else { 1.0 };
            if !moves_freely(self.lp, j, want) {
                continue;
            }
            let target = if want > 0.0 {
                self.lp.col_upper(j)
            } else {
                self.lp.col_lower(j)
            };
            if target.is_finite() {
                self.fix(j, target);
            }
        }
        Ok(())
    }

    // ---- 10 / 11: substitution from equality rows ----

    /// nnz change of eliminating `k` through equality row `i`, removing the
    /// row when `drop_row` and otherwise keeping it without `x_k`.
    fn substitution_delta(&self, i: usize, k: usize, drop_row: bool) -> isize {
        let row = self.lp.row(i);
        let mut delta: isize = if drop_row { -(row.len() as isize) } else { -1 };
        for e in self.lp.col(k) {
            if e.index == i {
                continue;
            }
            delta -= 1;
            let other = self.lp.row(e.index);
            for f in row {
                if f.index != k && other.binary_search_by_key(&f.index, |g| g.index).is_err() {
                    delta += 1;
                }
            }
        }
        delta
    }

    /// Replaces `x_k` by `(b − Σ_{j≠k} a_ij x_j)/a_ik` in the objective and
    /// every other row. Leaves row `i` and column `k` in place.
    fn substitute(&mut self, i: usize, k: usize) {
        let b = self.lp.row_lower(i);
        let a = self.lp.coef(i, k);
        let others = others_of(self.lp.row(i), k);
        self.stack.push(Reduction::Substituted {
            col: k,
            pivot: a,
            rhs: b,
            others: others.clone(),
        });
        let c = self.lp.cost(k);
        if c != 0.0 {
            self.lp.add_obj_offset(c * b / a);
            for &(j, aj) in &others {
                let cj = self.lp.cost(j) - c * aj / a;
                self.lp.set_cost(j, if cj.abs() <= ZERO_TOL { 0.0 } else { cj });
            }
            self.lp.set_cost(k, 0.0);
        }
        let col: Vec<(usize, f64)> = others_of(self.lp.col(k), i);
        for (r, ark) in col {
            self.work.scanned += others.len() as u64;
            let ratio = ark / a;
            for &(j, aj) in &others {
                let v = self.lp.coef(r, j) - ratio * aj;
                self.lp.set_coef(r, j, v).expect("finite coefficient");
            }
            let shift = ratio * b;
            let (rl, ru) = (self.lp.row_lower(r), self.lp.row_upper(r));
            self.lp
                .set_row_bounds(r, rl - shift, ru - shift)
                .expect("shifted bounds");
        }
        self.work.applied += 1;
    }

    fn doubleton(&mut self) -> PassResult {
        for i in self.rows() {
            if !self.lp.is_row_active(i) {
                continue;
            }
            self.work.scanned += 1;
            if self.lp.row(i).len() != 2 || !self.lp.is_equality(i) {
                continue;
            }
            let r = self.lp.row(i);
            let (e1, e2) = (r[0].clone(), r[1].clone());
            if e1.value.abs() < PIVOT_MIN || e2.value.abs() < PIVOT_MIN {
                continue;
            }
            // Eliminate the column with fewer entries; ties go to the larger
            // pivot, then the lower index.
            let n1 = self.lp.col(e1.index).len();
            let n2 = self.lp.col(e2.index).len();
            let (k, o) = if n2 < n1 || (n2 == n1 && e2.value.abs() > e1.value.abs()) {
                (e2, e1)
            } else {
                (e1, e2)
            };
            let b = self.lp.row_lower(i);
            // a_o·x_o = b − a_k·x_k with x_k ∈ [l_k, u_k]
            let (tmin, tmax) = term_range(k.value, self.lp.col_lower(k.index), self.lp.col_upper(k.index));
            let (lo, hi) = (b - tmax, b - tmin);
            let (nl, nu) = if o.value > 0.0 {
                (lo / o.value, hi / o.value)
            } else {
                (hi / o.value, lo / o.value)
            };
            self.tighten_col(o.index, nl, nu, i)?;
            self.substitute(i, k.index);
            self.lp.remove_row(i).expect("active row");
            self.lp.drop_column(k.index).expect("active column");
        }
        Ok(())
    }

    fn tripleton(&mut self) -> PassResult {
        for i in self.rows() {
            if !self.lp.is_row_active(i) {
                continue;
            }
            self.work.scanned += 1;
            if self.lp.row(i).len() != 3 || !self.lp.is_equality(i) {
                continue;
            }
            let entries = self.lp.row(i).to_vec();
            let act = Activity::of_row(self.lp, i);
            let mut best: Option<(bool, isize, usize)> = None;
            for e in &entries {
                if e.value.abs() < PIVOT_MIN {
                    continue;
                }
                let free = is_implied_free_in(self.lp, i, &act, e.index, e.value);
                let delta = self.substitution_delta(i, e.index, free);
                if delta > 0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bf, bd, _)) => (free && !bf) || (free == bf && delta < bd),
                };
                if better {
                    best = Some((free, delta, e.index));
                }
            }
            let Some((free, _, k)) = best else {
                continue;
            };
            self.work.scanned += self.lp.col(k).len() as u64;
            let a = self.lp.coef(i, k);
            let b = self.lp.row_lower(i);
            let (l, u) = (self.lp.col_lower(k), self.lp.col_upper(k));
            self.substitute(i, k);
            if free {
                self.lp.remove_row(i).expect("active row");
            } else {
                // Σ_{j≠k} a_j x_j = b − a·x_k ∈ [b − max, b − min]
                let (tmin, tmax) = term_range(a, l, u);
                self.lp.set_row_bounds(i, b - tmax, b - tmin).expect("row bounds");
            }
            self.lp.drop_column(k).expect("active column");
        }
        Ok(())
    }

    // ---- 12 ----

    fn forcing(&mut self) -> PassResult {
        for i in self.rows() {
            if !self.lp.is_row_active(i) {
                continue;
            }
            self.work.scanned += 1 + self.lp.row(i).len() as u64;
            let act = Activity::of_row(self.lp, i);
            let class = super::activity::classify_row(self.lp, i, &act);
            let at_min = match class {
                RowClass::Infeasible => return Err(i),
                RowClass::ForcingAtUpper => true,
                RowClass::ForcingAtLower => false,
                _ => continue,
            };
            let entries = others_of(self.lp.row(i), usize::MAX);
            for (j, a) in entries {
                let (l, u) = (self.lp.col_lower(j), self.lp.col_upper(j));
                let value = if (a > 0.0) == at_min { l } else { u };
                self.fix(j, value);
            }
            self.drop_row(i);
        }
        Ok(())
    }

    // ---- 13 ----

    fn slack_singleton(&mut self) -> PassResult {
        for j in self.cols() {
            if !self.lp.is_col_active(j) {
                continue;
            }
            self.work.scanned += 1;
            if self.lp.col(j).len() != 1 || self.lp.cost(j) != 0.0 {
                continue;
            }
            let e = self.lp.col(j)[0].clone();
            let (i, a) = (e.index, e.value);
            let (l, u) = (self.lp.col_lower(j), self.lp.col_upper(j));
            let (tmin, tmax) = term_range(a, l, u);
            let (bl, bu) = (self.lp.row_lower(i), self.lp.row_upper(i));
            let nl = crate::lp::ext_sub(bl, tmax).expect("no ∞ − ∞");
            let nu = crate::lp::ext_sub(bu, tmin).expect("no ∞ − ∞");
            self.work.scanned += self.lp.row(i).len() as u64;
            self.stack.push(Reduction::SlackSingleton {
                col: j,
                coef: a,
                bounds: (l, u),
                row: RowSnapshot::take(self.lp, i, j),
            });
            self.lp.set_row_bounds(i, nl, nu).expect("row bounds");
            self.lp.drop_column(j).expect("active column");
            self.work.applied += 1;
        }
        Ok(())
    }
}

/// True when moving `x_j` in direction `dir` never makes any row less
/// satisfied.
fn moves_freely(lp: &LpProblem, j: usize, dir: f64) -> bool {
    lp.col(j).iter().all(|e| {
        let raises = e.value * dir > 0.0;
        if raises {
            lp.row_upper(e.index) == f64::INFINITY
        } else {
            lp.row_lower(e.index) == f64::NEG_INFINITY
        }
    })
}

/// Support plus the coefficient pattern normalized by the first entry,
/// quantized. Parallel vectors share a key up to rounding at bucket edges.
fn pattern_key(v: &[crate::lp::Entry]) -> Vec<(usize, i64)> {
    let first = v[0].value;
    v.iter()
        .map(|e| (e.index, ((e.value / first) * 1e6).round() as i64))
        .collect()
}

/// `alpha` with `x = alpha·y` entrywise (same support), if it exists.
fn parallel_ratio(x: &[crate::lp::Entry], y: &[crate::lp::Entry]) -> Option<f64> {
    if x.len() != y.len() || x.is_empty() {
        return None;
    }
    let alpha = x[0].value / y[0].value;
    for (a, b) in x.iter().zip(y) {
        if a.index != b.index || !close(a.value, alpha * b.value) {
            return None;
        }
    }
    Some(alpha)
}
