//! Sparse linear programs in general form.
//!
//! ```text
//! min  cᵀx + offset
//! s.t. row_lower ≤ Ax ≤ row_upper
//!      col_lower ≤ x  ≤ col_upper
//! ```
//!
//! Bounds are `f64` values where `f64::INFINITY` / `f64::NEG_INFINITY` stand
//! for missing bounds. Arithmetic that could produce `∞ − ∞` goes through
//! [`ext_sub`] / [`ext_add`], which reject the indeterminate case.
//!
//! Rows and columns are never physically deleted while presolving; removal
//! tombstones the index so that reductions recorded on a presolve stack keep
//! referring to stable indices. [`LpProblem::compact`] produces a dense copy.

use std::fmt;

use thiserror::Error;

/// Coefficients whose magnitude drops to this value or below after arithmetic
/// are removed from storage.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row index {0} out of range or already removed")]
    RowOutOfRange(usize),
    #[error("column index {0} out of range or already removed")]
    ColOutOfRange(usize),
    #[error("indeterminate bound arithmetic (∞ − ∞)")]
    Indeterminate,
    #[error("non-finite value {value} for {what}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("inconsistent bounds on {what} {index}: [{lower}, {upper}]")]
    InvertedBounds {
        what: &'static str,
        index: usize,
        lower: f64,
        upper: f64,
    },
    #[error("view mismatch: {0}")]
    Inconsistent(String),
}

/// `a + b` on extended reals; `∞ + (−∞)` is an error.
pub fn ext_add(a: f64, b: f64) -> Result<f64, LpError> {
    if a.is_infinite() && b.is_infinite() && a.signum() != b.signum() {
        return Err(LpError::Indeterminate);
    }
    Ok(a + b)
}

/// `a − b` on extended reals; `∞ − ∞` is an error.
pub fn ext_sub(a: f64, b: f64) -> Result<f64, LpError> {
    ext_add(a, -b)
}

/// One stored coefficient, seen from a row (index = column) or from a column
/// (index = row).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration-limit",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub primal: Vec<f64>,
    pub objective: f64,
    pub status: Status,
}

impl Solution {
    pub fn not_optimal(status: Status, ncols: usize) -> Self {
        let objective = match status {
            Status::Unbounded => f64::NEG_INFINITY,
            Status::Infeasible => f64::INFINITY,
            _ => f64::NAN,
        };
        Solution {
            primal: vec![0.0; ncols],
            objective,
            status,
        }
    }
}

/// Maps compacted indices back to the index space they were taken from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub name: String,
    obj: Vec<f64>,
    obj_offset: f64,
    col_lower: Vec<f64>,
    col_upper: Vec<f64>,
    row_lower: Vec<f64>,
    row_upper: Vec<f64>,
    rows: Vec<Vec<Entry>>,
    cols: Vec<Vec<Entry>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    row_names: Vec<String>,
    col_names: Vec<String>,
    live_rows: usize,
    live_cols: usize,
    nnz: usize,
}

impl Default for LpProblem {
    fn default() -> Self {
        Self::new("LP")
    }
}

fn insert_sorted(list: &mut Vec<Entry>, index: usize, value: f64) {
    match list.binary_search_by_key(&index, |e| e.index) {
        Ok(pos) => list[pos].value = value,
        Err(pos) => list.insert(pos, Entry { index, value }),
    }
}

fn remove_sorted(list: &mut Vec<Entry>, index: usize) -> Option<f64> {
    match list.binary_search_by_key(&index, |e| e.index) {
        Ok(pos) => Some(list.remove(pos).value),
        Err(_) => None,
    }
}

impl LpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        LpProblem {
            name: name.into(),
            obj: Vec::new(),
            obj_offset: 0.0,
            col_lower: Vec::new(),
            col_upper: Vec::new(),
            row_lower: Vec::new(),
            row_upper: Vec::new(),
            rows: Vec::new(),
            cols: Vec::new(),
            row_alive: Vec::new(),
            col_alive: Vec::new(),
            row_names: Vec::new(),
            col_names: Vec::new(),
            live_rows: 0,
            live_cols: 0,
            nnz: 0,
        }
    }

    /// Appends a column with no coefficients and returns its index.
    pub fn add_col(
        &mut self,
        name: impl Into<String>,
        cost: f64,
        lower: f64,
        upper: f64,
    ) -> Result<usize, LpError> {
        let j = self.cols.len();
        check_finite("cost", cost)?;
        check_bounds("column", j, lower, upper)?;
        self.obj.push(cost);
        self.col_lower.push(lower);
        self.col_upper.push(upper);
        self.cols.push(Vec::new());
        self.col_alive.push(true);
        self.col_names.push(name.into());
        self.live_cols += 1;
        Ok(j)
    }

    /// Appends a row with the given coefficients (duplicate columns are summed).
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        entries: &[(usize, f64)],
    ) -> Result<usize, LpError> {
        let i = self.rows.len();
        check_bounds("row", i, lower, upper)?;
        for &(j, a) in entries {
            if !self.is_col_active(j) {
                return Err(LpError::ColOutOfRange(j));
            }
            check_finite("coefficient", a)?;
        }
        self.row_lower.push(lower);
        self.row_upper.push(upper);
        self.rows.push(Vec::new());
        self.row_alive.push(true);
        self.row_names.push(name.into());
        self.live_rows += 1;
        for &(j, a) in entries {
            let cur = self.coef(i, j);
            self.set_coef(i, j, cur + a)?;
        }
        Ok(i)
    }

    pub fn row_capacity(&self) -> usize {
        self.rows.len()
    }

    pub fn col_capacity(&self) -> usize {
        self.cols.len()
    }

    /// Number of live rows.
    pub fn num_rows(&self) -> usize {
        self.live_rows
    }

    /// Number of live columns.
    pub fn num_cols(&self) -> usize {
        self.live_cols
    }

    /// Number of stored nonzero coefficients.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn is_row_active(&self, i: usize) -> bool {
        self.row_alive.get(i).copied().unwrap_or(false)
    }

    pub fn is_col_active(&self, j: usize) -> bool {
        self.col_alive.get(j).copied().unwrap_or(false)
    }

    pub fn active_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows.len()).filter(move |&i| self.row_alive[i])
    }

    pub fn active_cols(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cols.len()).filter(move |&j| self.col_alive[j])
    }

    /// Entries of row `i`, sorted by column index.
    pub fn row(&self, i: usize) -> &[Entry] {
        &self.rows[i]
    }

    /// Entries of column `j`, sorted by row index.
    pub fn col(&self, j: usize) -> &[Entry] {
        &self.cols[j]
    }

    pub fn coef(&self, i: usize, j: usize) -> f64 {
        match self.rows.get(i) {
            Some(r) => r
                .binary_search_by_key(&j, |e| e.index)
                .map(|p| r[p].value)
                .unwrap_or(0.0),
            None => 0.0,
        }
    }

    /// Sets `a_ij`, dropping the entry when `|value| ≤ ZERO_TOL`.
    pub fn set_coef(&mut self, i: usize, j: usize, value: f64) -> Result<(), LpError> {
        if !self.is_row_active(i) {
            return Err(LpError::RowOutOfRange(i));
        }
        if !self.is_col_active(j) {
            return Err(LpError::ColOutOfRange(j));
        }
        check_finite("coefficient", value)?;
        let had = remove_sorted(&mut self.rows[i], j).is_some();
        remove_sorted(&mut self.cols[j], i);
        if had {
            self.nnz -= 1;
        }
        if value.abs() > ZERO_TOL {
            insert_sorted(&mut self.rows[i], j, value);
            insert_sorted(&mut self.cols[j], i, value);
            self.nnz += 1;
        }
        Ok(())
    }

    pub fn obj(&self) -> &[f64] {
        &self.obj
    }

    pub fn cost(&self, j: usize) -> f64 {
        self.obj[j]
    }

    pub fn set_cost(&mut self, j: usize, c: f64) {
        self.obj[j] = if c.abs() <= ZERO_TOL { 0.0 } else { c };
    }

    pub fn obj_offset(&self) -> f64 {
        self.obj_offset
    }

    pub fn add_obj_offset(&mut self, delta: f64) {
        self.obj_offset += delta;
    }

    pub fn col_lower(&self, j: usize) -> f64 {
        self.col_lower[j]
    }

    pub fn col_upper(&self, j: usize) -> f64 {
        self.col_upper[j]
    }

    pub fn row_lower(&self, i: usize) -> f64 {
        self.row_lower[i]
    }

    pub fn row_upper(&self, i: usize) -> f64 {
        self.row_upper[i]
    }

    pub fn col_bounds(&self) -> (&[f64], &[f64]) {
        (&self.col_lower, &self.col_upper)
    }

    pub fn row_bounds(&self) -> (&[f64], &[f64]) {
        (&self.row_lower, &self.row_upper)
    }

    pub fn set_col_bounds(&mut self, j: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        check_bounds("column", j, lower, upper)?;
        self.col_lower[j] = lower;
        self.col_upper[j] = upper;
        Ok(())
    }

    pub fn set_row_bounds(&mut self, i: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        check_bounds("row", i, lower, upper)?;
        self.row_lower[i] = lower;
        self.row_upper[i] = upper;
        Ok(())
    }

    pub fn row_name(&self, i: usize) -> &str {
        &self.row_names[i]
    }

    pub fn col_name(&self, j: usize) -> &str {
        &self.col_names[j]
    }

    pub fn is_equality(&self, i: usize) -> bool {
        self.row_lower[i] == self.row_upper[i]
    }

    /// Deletes column `j` with `x_j` fixed at `fixed_value`, moving its
    /// contribution into the row bounds and the objective offset. Returns the
    /// rows that lost an entry.
    pub fn remove_column(&mut self, j: usize, fixed_value: f64) -> Result<Vec<usize>, LpError> {
        if !self.is_col_active(j) {
            return Err(LpError::ColOutOfRange(j));
        }
        check_finite("fixed value", fixed_value)?;
        let entries = std::mem::take(&mut self.cols[j]);
        let mut touched = Vec::with_capacity(entries.len());
        for e in &entries {
            let i = e.index;
            remove_sorted(&mut self.rows[i], j);
            let shift = e.value * fixed_value;
            if shift != 0.0 {
                // Infinite bounds stay infinite.
                self.row_lower[i] -= shift;
                self.row_upper[i] -= shift;
            }
            touched.push(i);
        }
        self.nnz -= entries.len();
        self.obj_offset += self.obj[j] * fixed_value;
        self.col_alive[j] = false;
        self.live_cols -= 1;
        Ok(touched)
    }

    /// Deletes row `i` and its entries.
    pub fn remove_row(&mut self, i: usize) -> Result<(), LpError> {
        if !self.is_row_active(i) {
            return Err(LpError::RowOutOfRange(i));
        }
        let entries = std::mem::take(&mut self.rows[i]);
        for e in &entries {
            remove_sorted(&mut self.cols[e.index], i);
        }
        self.nnz -= entries.len();
        self.row_alive[i] = false;
        self.live_rows -= 1;
        Ok(())
    }

    /// Deletes column `j` without touching bounds or offset. Used by
    /// substitution reductions that have already folded the column away.
    pub(crate) fn drop_column(&mut self, j: usize) -> Result<(), LpError> {
        if !self.is_col_active(j) {
            return Err(LpError::ColOutOfRange(j));
        }
        let entries = std::mem::take(&mut self.cols[j]);
        for e in &entries {
            remove_sorted(&mut self.rows[e.index], j);
        }
        self.nnz -= entries.len();
        self.col_alive[j] = false;
        self.live_cols -= 1;
        Ok(())
    }

    /// All `(i, j, a_ij)` triples as seen by the row view, sorted.
    pub fn triples_by_row(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz);
        for i in self.active_rows() {
            out.extend(self.rows[i].iter().map(|e| (i, e.index, e.value)));
        }
        out
    }

    /// All `(i, j, a_ij)` triples as seen by the column view, sorted by `(i, j)`.
    pub fn triples_by_col(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz);
        for j in self.active_cols() {
            out.extend(self.cols[j].iter().map(|e| (e.index, j, e.value)));
        }
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    /// Verifies the storage invariants.
    pub fn check_consistency(&self) -> Result<(), LpError> {
        let by_row = self.triples_by_row();
        let by_col = self.triples_by_col();
        if by_row != by_col {
            return Err(LpError::Inconsistent("row and column views differ".into()));
        }
        if by_row.len() != self.nnz {
            return Err(LpError::Inconsistent(format!(
                "nnz counter {} but {} stored triples",
                self.nnz,
                by_row.len()
            )));
        }
        for &(i, j, a) in &by_row {
            if !self.is_col_active(j) || !self.is_row_active(i) {
                return Err(LpError::Inconsistent(format!("entry ({i},{j}) on removed index")));
            }
            if a == 0.0 || !a.is_finite() {
                return Err(LpError::Inconsistent(format!("entry ({i},{j}) = {a}")));
            }
        }
        for i in self.active_rows() {
            check_bounds("row", i, self.row_lower[i], self.row_upper[i])?;
        }
        for j in self.active_cols() {
            check_bounds("column", j, self.col_lower[j], self.col_upper[j])?;
        }
        Ok(())
    }

    /// Dense copy holding only live rows and columns, plus the maps from new
    /// to old indices.
    pub fn compact(&self) -> (LpProblem, IndexMap) {
        let rows: Vec<usize> = self.active_rows().collect();
        let cols: Vec<usize> = self.active_cols().collect();
        let mut col_pos = vec![usize::MAX; self.cols.len()];
        for (new, &old) in cols.iter().enumerate() {
            col_pos[old] = new;
        }
        let mut out = LpProblem::new(self.name.clone());
        out.obj_offset = self.obj_offset;
        for &j in &cols {
            out.obj.push(self.obj[j]);
            out.col_lower.push(self.col_lower[j]);
            out.col_upper.push(self.col_upper[j]);
            out.col_names.push(self.col_names[j].clone());
            out.col_alive.push(true);
            out.cols.push(Vec::new());
        }
        out.live_cols = cols.len();
        for (new_i, &i) in rows.iter().enumerate() {
            out.row_lower.push(self.row_lower[i]);
            out.row_upper.push(self.row_upper[i]);
            out.row_names.push(self.row_names[i].clone());
            out.row_alive.push(true);
            let entries: Vec<Entry> = self.rows[i]
                .iter()
                .map(|e| Entry {
                    index: col_pos[e.index],
                    value: e.value,
                })
                .collect();
            for e in &entries {
                out.cols[e.index].push(Entry {
                    index: new_i,
                    value: e.value,
                });
            }
            out.nnz += entries.len();
            out.rows.push(entries);
        }
        out.live_rows = rows.len();
        (out, IndexMap { rows, cols })
    }

    /// Row activity `a_iᵀx` for a full-length primal vector.
    pub fn row_activity(&self, i: usize, x: &[f64]) -> f64 {
        self.rows[i].iter().map(|e| e.value * x[e.index]).sum()
    }

    /// `cᵀx + offset` over live columns.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.active_cols().map(|j| self.obj[j] * x[j]).sum::<f64>() + self.obj_offset
    }

    /// Largest violation of any live row or column bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for j in self.active_cols() {
            worst = worst
                .max(self.col_lower[j] - x[j])
                .max(x[j] - self.col_upper[j]);
        }
        for i in self.active_rows() {
            let act = self.row_activity(i, x);
            worst = worst
                .max(self.row_lower[i] - act)
                .max(act - self.row_upper[i]);
        }
        worst
    }

    /// Fraction of nonzeros relative to a full `rows × cols` matrix.
    pub fn density(&self) -> f64 {
        let cells = self.live_rows as f64 * self.live_cols as f64;
        if cells == 0.0 {
            0.0
        } else {
            self.nnz as f64 / cells
        }
    }
}

fn check_finite(what: &'static str, value: f64) -> Result<(), LpError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(LpError::NonFinite { what, value })
    }
}

fn check_bounds(what: &'static str, index: usize, lower: f64, upper: f64) -> Result<(), LpError> {
    if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
        return Err(LpError::InvertedBounds {
            what,
            index,
            lower,
            upper,
        });
    }
    Ok(())
}
