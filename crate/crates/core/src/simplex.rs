//! Bounded-variable primal simplex: Dantzig pricing, falling back to Bland's
//! rule during runs of degenerate pivots so that it cannot cycle.
//!
//! Each row gets a logical variable `s_i = a_iᵀx` bounded by the row bounds,
//! so the constraint system is `[A −I] (x, s) = 0`. Rows whose logical starts
//! outside its bounds get an artificial column; phase one drives the sum of
//! artificials to zero, phase two fixes them at zero and optimizes `cᵀx`.
//!
//! The basis inverse is kept dense and updated in product form, with a fresh
//! Gauss-Jordan factorization every [`REFACTOR_EVERY`] iterations.

use std::time::Instant;

use crate::lp::{LpProblem, Solution, Status};

const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub pivot_tolerance: f64,
    pub feasibility_tolerance: f64,
    pub optimality_tolerance: f64,
    /// Consecutive degenerate pivots after which pricing switches to Bland's
    /// rule until the next nondegenerate step. 0 prices by Bland throughout.
    pub bland_after: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 50_000,
            pivot_tolerance: 1e-9,
            feasibility_tolerance: 1e-9,
            optimality_tolerance: 1e-9,
            bland_after: 25,
        }
    }
}

/// A solve plus instrumentation.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Solution,
    /// Simplex iterations (basis changes and bound flips) over both phases.
    pub iterations: usize,
    pub elapsed_secs: f64,
    /// Live rows and nonzeros of the problem that was solved.
    pub rows: usize,
    pub nnz: usize,
}

/// Solves `lp` (live rows and columns only). The returned primal vector is
/// indexed like `lp`'s columns; removed columns get 0.
pub fn solve(lp: &LpProblem, opts: &SolverOptions) -> Solution {
    solve_report(lp, opts).solution
}

pub fn solve_report(lp: &LpProblem, opts: &SolverOptions) -> SolveReport {
    let start = Instant::now();
    let (compact, map) = lp.compact();
    let (sol, iterations) = Simplex::new(&compact, opts).run();
    let mut primal = vec![0.0; lp.col_capacity()];
    for (k, &j) in map.cols.iter().enumerate() {
        primal[j] = sol.primal[k];
    }
    SolveReport {
        solution: Solution {
            primal,
            objective: sol.objective,
            status: sol.status,
        },
        iterations,
        elapsed_secs: start.elapsed().as_secs_f64(),
        rows: lp.num_rows(),
        nnz: lp.nnz(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    Zero,
}

struct Simplex<'a> {
    lp: &'a LpProblem,
    opts: SolverOptions,
    m: usize,
    n: usize,
    /// Artificial k sits in row `art_row[k]` with coefficient `art_sign[k]`.
    art_row: Vec<usize>,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LpProblem, opts: &SolverOptions) -> Self {
        let m = lp.num_rows();
        let n = lp.num_cols();
        let mut lower = Vec::with_capacity(n + 2 * m);
        let mut upper = Vec::with_capacity(n + 2 * m);
        let mut x = Vec::with_capacity(n + 2 * m);
        let mut state = Vec::with_capacity(n + 2 * m);
        for j in 0..n {
            let (l, u) = (lp.col_lower(j), lp.col_upper(j));
            lower.push(l);
            upper.push(u);
            if l.is_finite() {
                x.push(l);
                state.push(VarState::AtLower);
            } else if u.is_finite() {
                x.push(u);
                state.push(VarState::AtUpper);
            } else {
                x.push(0.0);
                state.push(VarState::Zero);
            }
        }
        let tol = opts.feasibility_tolerance;
        let mut basis = Vec::with_capacity(m);
        let mut art_row = Vec::new();
        let mut art_sign = Vec::new();
        let mut slack_vals = Vec::with_capacity(m);
        let mut slack_states = Vec::with_capacity(m);
        for i in 0..m {
            let r: f64 = lp.row(i).iter().map(|e| e.value * x[e.index]).sum();
            let (l, u) = (lp.row_lower(i), lp.row_upper(i));
            lower.push(l);
            upper.push(u);
            if r >= l - tol && r <= u + tol {
                slack_vals.push(r);
                slack_states.push(VarState::Basic);
                basis.push(n + i);
            } else {
                let (b, st) = if r < l {
                    (l, VarState::AtLower)
                } else {
                    (u, VarState::AtUpper)
                };
                slack_vals.push(b);
                slack_states.push(st);
                art_row.push(i);
                // a_iᵀx − s_i + σ·art = 0 with art = |b − r|.
                art_sign.push(if b > r { 1.0 } else { -1.0 });
                basis.push(usize::MAX);
            }
        }
        x.extend(slack_vals);
        state.extend(slack_states);
        for (k, &i) in art_row.iter().enumerate() {
            let var = n + m + k;
            basis[i] = var;
            lower.push(0.0);
            upper.push(f64::INFINITY);
            x.push((x[n + i] - lp.row(i).iter().map(|e| e.value * x[e.index]).sum::<f64>()) * art_sign[k]);
            state.push(VarState::Basic);
        }
        let total = n + m + art_row.len();
        let mut cost = vec![0.0; total];
        for c in cost.iter_mut().skip(n + m) {
            *c = 1.0;
        }
        let mut s = Simplex {
            lp,
            opts: *opts,
            m,
            n,
            art_row,
            art_sign,
            lower,
            upper,
            cost,
            x,
            state,
            basis,
            binv: vec![0.0; m * m],
            iterations: 0,
            since_refactor: 0,
            degenerate_run: 0,
        };
        s.refactor();
        s
    }

    fn nvars(&self) -> usize {
        self.x.len()
    }

    /// Sparse column of the constraint matrix `[A −I Art]`.
    fn column(&self, var: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if var < self.n {
            out.extend(self.lp.col(var).iter().map(|e| (e.index, e.value)));
        } else if var < self.n + self.m {
            out.push((var - self.n, -1.0));
        } else {
            let k = var - self.n - self.m;
            out.push((self.art_row[k], self.art_sign[k]));
        }
    }

    /// Rebuilds `B⁻¹` by Gauss-Jordan elimination with partial pivoting and
    /// recomputes the basic values.
    fn refactor(&mut self) {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        let mut col = Vec::new();
        for (pos, &var) in self.basis.iter().enumerate() {
            self.column(var, &mut col);
            for &(i, v) in &col {
                b[i * m + pos] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let mut piv = c;
            for r in c + 1..m {
                if b[r * m + c].abs() > b[piv * m + c].abs() {
                    piv = r;
                }
            }
            if b[piv * m + c] == 0.0 {
                // Singular basis; keep the previous inverse.
                return;
            }
            if piv != c {
                for k in 0..m {
                    b.swap(piv * m + k, c * m + k);
                    inv.swap(piv * m + k, c * m + k);
                }
            }
            let d = b[c * m + c];
            for k in 0..m {
                b[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = b[r * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        b[r * m + k] -= f * b[c * m + k];
                        inv[r * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        // Row `pos` of inv maps constraint rows to basis position `pos`.
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_basics();
    }

    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut rhs = vec![0.0; m];
        let mut col = Vec::new();
        for var in 0..self.nvars() {
            if self.state[var] == VarState::Basic || self.x[var] == 0.0 {
                continue;
            }
            self.column(var, &mut col);
            for &(i, v) in &col {
                rhs[i] -= v * self.x[var];
            }
        }
        for pos in 0..m {
            let row = &self.binv[pos * m..(pos + 1) * m];
            let v: f64 = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
            self.x[self.basis[pos]] = v;
        }
    }

    /// `y = B⁻ᵀ c_B`.
    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for pos in 0..m {
            let cb = self.cost[self.basis[pos]];
            if cb != 0.0 {
                let row = &self.binv[pos * m..(pos + 1) * m];
                for (yi, &r) in y.iter_mut().zip(row) {
                    *yi += cb * r;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, var: usize, y: &[f64], col: &mut Vec<(usize, f64)>) -> f64 {
        self.column(var, col);
        self.cost[var] - col.iter().map(|&(i, v)| y[i] * v).sum::<f64>()
    }

    /// `B⁻¹ a_var`.
    fn ftran(&self, var: usize, col: &mut Vec<(usize, f64)>) -> Vec<f64> {
        self.column(var, col);
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for (pos, a) in alpha.iter_mut().enumerate() {
            let row = &self.binv[pos * m..(pos + 1) * m];
            *a = col.iter().map(|&(i, v)| row[i] * v).sum();
        }
        alpha
    }

    fn run_phase(&mut self) -> PhaseOutcome {
        let dtol = self.opts.optimality_tolerance;
        let ptol = self.opts.pivot_tolerance;
        let mut col = Vec::new();
        loop {
            if self.iterations >= self.opts.max_iterations {
                return PhaseOutcome::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            let y = self.duals();
            // Dantzig pricing; Bland (lowest eligible index) once the
            // current run of degenerate pivots reaches `bland_after`.
            let bland = self.degenerate_run >= self.opts.bland_after;
            let mut entering = None;
            let mut best_d = 0.0;
            for var in 0..self.nvars() {
                let st = self.state[var];
                if st == VarState::Basic || self.lower[var] == self.upper[var] {
                    continue;
                }
                let d = self.reduced_cost(var, &y, &mut col);
                let can_up = matches!(st, VarState::AtLower | VarState::Zero);
                let can_down = matches!(st, VarState::AtUpper | VarState::Zero);
                let cand = if d < -dtol && can_up {
                    Some(1.0)
                } else if d > dtol && can_down {
                    Some(-1.0)
                } else {
                    None
                };
                if let Some(dir) = cand {
                    if bland {
                        entering = Some((var, dir));
                        break;
                    }
                    if d.abs() > best_d {
                        best_d = d.abs();
                        entering = Some((var, dir));
                    }
                }
            }
            let Some((q, dir)) = entering else {
                return PhaseOutcome::Optimal;
            };
            let alpha = self.ftran(q, &mut col);

            // Ratio test; ties go to the lowest variable index.
            let mut best_t = f64::INFINITY;
            let mut leave: Option<(usize, VarState)> = None;
            for (pos, &a) in alpha.iter().enumerate() {
                let beta = dir * a;
                let var = self.basis[pos];
                let (t, hit) = if beta > ptol && self.lower[var].is_finite() {
                    (((self.x[var] - self.lower[var]) / beta).max(0.0), VarState::AtLower)
                } else if beta < -ptol && self.upper[var].is_finite() {
                    (((self.upper[var] - self.x[var]) / -beta).max(0.0), VarState::AtUpper)
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((lp_pos, _)) => {
                        t < best_t - 1e-12 || (t <= best_t + 1e-12 && var < self.basis[lp_pos])
                    }
                };
                if better {
                    best_t = if leave.is_none() { t } else { best_t.min(t) };
                    leave = Some((pos, hit));
                }
            }
            let flip = self.upper[q] - self.lower[q];
            if leave.is_none() && !flip.is_finite() {
                return PhaseOutcome::Unbounded;
            }
            self.iterations += 1;
            if flip.is_finite() && (leave.is_none() || flip <= best_t) {
                for (pos, &a) in alpha.iter().enumerate() {
                    let var = self.basis[pos];
                    self.x[var] -= dir * flip * a;
                }
                if dir > 0.0 {
                    self.x[q] = self.upper[q];
                    self.state[q] = VarState::AtUpper;
                } else {
                    self.x[q] = self.lower[q];
                    self.state[q] = VarState::AtLower;
                }
                self.degenerate_run = 0;
                continue;
            }
            let (r, hit) = leave.expect("checked above");
            let t = best_t;
            if t > 1e-12 {
                self.degenerate_run = 0;
            } else {
                self.degenerate_run += 1;
            }
            for (pos, &a) in alpha.iter().enumerate() {
                let var = self.basis[pos];
                self.x[var] -= dir * t * a;
            }
            self.x[q] += dir * t;
            let leaving = self.basis[r];
            self.state[leaving] = hit;
            self.x[leaving] = match hit {
                VarState::AtLower => self.lower[leaving],
                _ => self.upper[leaving],
            };
            self.state[q] = VarState::Basic;
            self.basis[r] = q;
            self.pivot(r, &alpha);
        }
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let p = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= p;
        }
        for (pos, &a) in alpha.iter().enumerate() {
            if pos == r || a == 0.0 {
                continue;
            }
            for k in 0..m {
                let v = self.binv[r * m + k];
                if v != 0.0 {
                    self.binv[pos * m + k] -= a * v;
                }
            }
        }
        self.since_refactor += 1;
    }

    fn run(mut self) -> (Solution, usize) {
        let n = self.n;
        let m = self.m;
        let ftol = self.opts.feasibility_tolerance;
        if !self.art_row.is_empty() {
            match self.run_phase() {
                PhaseOutcome::IterationLimit => {
                    return (Solution::not_optimal(Status::IterationLimit, n), self.iterations)
                }
                // Phase one is bounded below by zero.
                PhaseOutcome::Unbounded | PhaseOutcome::Optimal => {}
            }
            self.refactor();
            let infeas: f64 = (n + m..self.nvars()).map(|v| self.x[v].max(0.0)).sum();
            let scale = 1.0 + self.art_row.len() as f64;
            if infeas > ftol.max(1e-9) * scale * 10.0 {
                return (Solution::not_optimal(Status::Infeasible, n), self.iterations);
            }
            for v in n + m..self.nvars() {
                self.lower[v] = 0.0;
                self.upper[v] = 0.0;
                if self.state[v] != VarState::Basic {
                    self.x[v] = 0.0;
                    self.state[v] = VarState::AtLower;
                }
            }
        }
        for v in 0..self.nvars() {
            self.cost[v] = if v < n { self.lp.cost(v) } else { 0.0 };
        }
        let outcome = self.run_phase();
        let status = match outcome {
            PhaseOutcome::Optimal => Status::Optimal,
            PhaseOutcome::Unbounded => Status::Unbounded,
            PhaseOutcome::IterationLimit => Status::IterationLimit,
        };
        if status != Status::Optimal {
            return (Solution::not_optimal(status, n), self.iterations);
        }
        self.refactor();
        let primal: Vec<f64> = self.x[..n].to_vec();
        let objective = (0..n).map(|j| self.lp.cost(j) * primal[j]).sum::<f64>() + self.lp.obj_offset();
        (
            Solution {
                primal,
                objective,
                status,
            },
            self.iterations,
        )
    }
}
