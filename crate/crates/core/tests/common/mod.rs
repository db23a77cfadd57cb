//! Test oracles and random problem generators shared by the integration
//! tests and the acceptance suite.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rl_presolve::lp::{LpProblem, Status};
use rl_presolve::presolve::{self, InfeasibleDetected, PresolveStack, PresolverId};
use rl_presolve::simplex::{self, SolverOptions};

pub const INF: f64 = f64::INFINITY;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

// ---------------------------------------------------------------------------
// Exhaustive basis enumeration.

/// Solves `M y = r` by Gaussian elimination with partial pivoting.
fn gauss(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-10 {
            return None;
        }
        m.swap(c, p);
        r.swap(c, p);
        for k in c + 1..n {
            let f = m[k][c] / m[c][c];
            if f != 0.0 {
                for t in c..n {
                    m[k][t] -= f * m[c][t];
                }
                r[k] -= f * r[c];
            }
        }
    }
    let mut y = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|t| m[c][t] * y[t]).sum();
        y[c] = (r[c] - s) / m[c][c];
    }
    Some(y)
}

/// Optimal objective by enumerating every basis of `[A −I](x, s) = 0` with
/// nonbasic variables at finite bounds. Requires finite column bounds.
/// Returns `None` when no basic solution is feasible.
pub fn enumerate_optimum(lp: &LpProblem) -> Option<f64> {
    let (lp, _) = lp.compact();
    let (m, n) = (lp.num_rows(), lp.num_cols());
    let total = n + m;
    let lower: Vec<f64> = (0..n)
        .map(|j| lp.col_lower(j))
        .chain((0..m).map(|i| lp.row_lower(i)))
        .collect();
    let upper: Vec<f64> = (0..n)
        .map(|j| lp.col_upper(j))
        .chain((0..m).map(|i| lp.row_upper(i)))
        .collect();
    // Column k of [A −I].
    let column = |k: usize| -> Vec<f64> {
        let mut v = vec![0.0; m];
        if k < n {
            for e in lp.col(k) {
                v[e.index] = e.value;
            }
        } else {
            v[k - n] = -1.0;
        }
        v
    };
    let cols: Vec<Vec<f64>> = (0..total).map(column).collect();
    let mut best: Option<f64> = None;
    let mut basis: Vec<usize> = (0..m).collect();
    loop {
        let nonbasic: Vec<usize> = (0..total).filter(|k| !basis.contains(k)).collect();
        let mat: Vec<Vec<f64>> = (0..m)
            .map(|i| basis.iter().map(|&k| cols[k][i]).collect())
            .collect();
        let singular = m > 0 && gauss(mat.clone(), vec![0.0; m]).is_none();
        if !singular {
            'choice: for mask in 0u32..(1 << nonbasic.len()) {
                let mut z = vec![0.0; total];
                for (t, &k) in nonbasic.iter().enumerate() {
                    let v = if mask >> t & 1 == 1 { upper[k] } else { lower[k] };
                    if !v.is_finite() {
                        continue 'choice;
                    }
                    // Skip duplicate choices for fixed variables.
                    if mask >> t & 1 == 1 && lower[k] == upper[k] {
                        continue 'choice;
                    }
                    z[k] = v;
                }
                let rhs: Vec<f64> = (0..m)
                    .map(|i| -nonbasic.iter().map(|&k| cols[k][i] * z[k]).sum::<f64>())
                    .collect();
                let y = if m == 0 {
                    Vec::new()
                } else {
                    gauss(mat.clone(), rhs).expect("nonsingular")
                };
                for (t, &k) in basis.iter().enumerate() {
                    z[k] = y[t];
                }
                let feasible = (0..total).all(|k| {
                    let tol = 1e-9 * (1.0 + z[k].abs());
                    z[k] >= lower[k] - tol && z[k] <= upper[k] + tol
                });
                if feasible {
                    let obj = lp.obj_offset() + (0..n).map(|j| lp.cost(j) * z[j]).sum::<f64>();
                    best = Some(best.map_or(obj, |b: f64| b.min(obj)));
                }
            }
        }
        // Next m-combination of 0..total.
        let mut t = m;
        loop {
            if t == 0 {
                return best;
            }
            t -= 1;
            if basis[t] < total - m + t {
                basis[t] += 1;
                for u in t + 1..m {
                    basis[u] = basis[u - 1] + 1;
                }
                break;
            }
        }
        if m == 0 {
            return best;
        }
    }
}

/// Random `m × n` LP with finite column bounds, integer data and a mix of
/// row senses. About one in ten is infeasible by construction.
pub fn random_small_lp(rng: &mut impl Rng, m: usize, n: usize) -> LpProblem {
    let mut lp = LpProblem::new("small");
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
    for (j, &v) in x0.iter().enumerate() {
        let l = v - rng.gen_range(0..=3) as f64;
        let u = v + rng.gen_range(0..=3) as f64;
        lp.add_col(format!("x{j}"), rng.gen_range(-5..=5) as f64, l, u)
            .unwrap();
    }
    let infeasible = rng.gen_bool(0.1);
    for i in 0..m {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.6) {
                let a = rng.gen_range(-4..=4) as f64;
                if a != 0.0 {
                    entries.push((j, a));
                }
            }
        }
        let r: f64 = entries.iter().map(|&(j, a)| a * x0[j]).sum();
        let slack = rng.gen_range(0..=4) as f64;
        let (mut l, mut u) = match rng.gen_range(0..4) {
            0 => (r, r),
            1 => (-INF, r + slack),
            2 => (r - slack, INF),
            _ => (r - slack, r + rng.gen_range(0..=4) as f64),
        };
        if infeasible && i == 0 {
            // Row demands more than the box allows.
            let max: f64 = entries
                .iter()
                .map(|&(j, a)| (a * lp.col_lower(j)).max(a * lp.col_upper(j)))
                .sum();
            l = max + 1.0;
            u = INF;
        }
        if l > u {
            std::mem::swap(&mut l, &mut u);
        }
        lp.add_row(format!("r{i}"), l, u, &entries).unwrap();
    }
    lp
}

// ---------------------------------------------------------------------------
// Presolve-triggering random problems.

/// Random LP (at most `max_m × max_n`) seeded with structures that activate
/// every presolver: fixed columns, row singletons, duplicate and scaled rows
/// and columns, doubleton and tripleton equalities, column singletons, zero
/// costs, forcing and redundant rows, and some infinite bounds. Feasible by
/// construction around a point `x0`; the objective may be unbounded.
pub fn random_presolve_lp(rng: &mut impl Rng, max_m: usize, max_n: usize) -> LpProblem {
    let n = rng.gen_range(2..=max_n);
    let m = rng.gen_range(1..=max_m);
    let mut a = vec![vec![0.0f64; n]; m];
    for row in a.iter_mut() {
        let k = match rng.gen_range(0..6) {
            0 => 1,
            1 | 2 => 2.min(n),
            3 => 3.min(n),
            _ => rng.gen_range(1..=n),
        };
        let mut support: Vec<usize> = (0..n).collect();
        for t in 0..k {
            let s = rng.gen_range(t..n);
            support.swap(t, s);
        }
        for &j in &support[..k] {
            let mut v = rng.gen_range(1..=4) as f64;
            if rng.gen_bool(0.4) {
                v = -v;
            }
            if rng.gen_bool(0.1) {
                v *= 0.5;
            }
            row[j] = v;
        }
    }
    // Column singletons and empty columns.
    for j in 0..n {
        let roll: f64 = rng.gen();
        if roll < 0.15 {
            let keep = rng.gen_range(0..m);
            for (i, row) in a.iter_mut().enumerate() {
                if i != keep {
                    row[j] = 0.0;
                }
            }
            if a[keep][j] == 0.0 {
                a[keep][j] = 1.0;
            }
        } else if roll < 0.18 {
            for row in a.iter_mut() {
                row[j] = 0.0;
            }
        }
    }
    // Scaled duplicate columns.
    let mut dup_of = vec![None; n];
    for j in 1..n {
        if rng.gen_bool(0.15) {
            let p = rng.gen_range(0..j);
            let alpha = [2.0, -1.0, 0.5, 1.0][rng.gen_range(0..4)];
            for row in a.iter_mut() {
                row[j] = alpha * row[p];
            }
            dup_of[j] = Some((p, alpha));
        }
    }
    // Scaled duplicate rows.
    let mut row_dup = vec![None; m];
    for i in 1..m {
        if rng.gen_bool(0.15) {
            let p = rng.gen_range(0..i);
            let alpha = [2.0, -1.0, 0.5, 3.0][rng.gen_range(0..4)];
            a[i] = a[p].iter().map(|v| alpha * v).collect();
            row_dup[i] = Some(alpha);
        }
    }

    let mut lp = LpProblem::new("presolve");
    let mut x0 = vec![0.0; n];
    let mut costs = vec![0.0; n];
    for j in 0..n {
        x0[j] = rng.gen_range(-2..=3) as f64;
        let at_bound = rng.gen_bool(0.3);
        let below = if at_bound { 0.0 } else { rng.gen_range(1..=3) as f64 };
        let above = rng.gen_range(0..=3) as f64;
        let (l, u) = match rng.gen_range(0..10) {
            0 => (x0[j], x0[j]),
            1 => (x0[j] - below, INF),
            2 => (-INF, x0[j] + above),
            3 => (-INF, INF),
            _ => (x0[j] - below, x0[j] + above),
        };
        costs[j] = if rng.gen_bool(0.3) {
            0.0
        } else {
            rng.gen_range(-5..=5) as f64
        };
        if let Some((p, alpha)) = dup_of[j] {
            if rng.gen_bool(0.5) {
                costs[j] = alpha * costs[p];
            }
        }
        lp.add_col(format!("x{j}"), costs[j], l, u).unwrap();
    }
    for (i, row) in a.iter().enumerate() {
        let entries: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, *v))
            .collect();
        let r: f64 = entries.iter().map(|&(j, v)| v * x0[j]).sum();
        let (lmin, lmax) = entries.iter().fold((0.0f64, 0.0f64), |(lo, hi), &(j, v)| {
            let (cl, cu) = (lp.col_lower(j), lp.col_upper(j));
            let (p, q) = if v > 0.0 { (v * cl, v * cu) } else { (v * cu, v * cl) };
            (lo + p, hi + q)
        });
        let slack = rng.gen_range(0..=3) as f64;
        let (l, u) = match rng.gen_range(0..9) {
            0..=2 => (r, r),
            3 => (-INF, r + slack),
            4 => (r - slack, INF),
            5 => (r - slack, r + rng.gen_range(0..=2) as f64),
            // Forcing when x0 sits at the activity-minimizing bounds.
            6 if lmin.is_finite() => (-INF, lmin.max(r)),
            7 if lmax.is_finite() => (lmin.min(r) - slack, lmax + 1.0),
            _ => (r - slack, INF),
        };
        let _ = row_dup[i];
        lp.add_row(format!("r{i}"), l, u, &entries).unwrap();
    }
    lp
}

// ---------------------------------------------------------------------------
// Equivalence checks.

pub fn opts() -> SolverOptions {
    SolverOptions::default()
}

/// Direct solve of `lp` as the reference.
pub fn reference(lp: &LpProblem) -> (Status, f64) {
    let s = simplex::solve(lp, &opts());
    (s.status, s.objective)
}

/// Outcome of reduce → solve → postsolve.
#[derive(Debug)]
pub enum Reduced {
    Solved { status: Status, objective: f64, max_violation: f64 },
    Infeasible(InfeasibleDetected),
}

/// Applies `ids` then solves and postsolves; the objective is evaluated on
/// the original problem at the postsolved point.
pub fn reduce_solve_postsolve(lp: &LpProblem, ids: &[PresolverId]) -> Reduced {
    let mut work = lp.clone();
    let mut stack = PresolveStack::new(lp);
    if let Err((_, e)) = presolve::apply_sequence(ids, &mut work, &mut stack) {
        return Reduced::Infeasible(e);
    }
    work.check_consistency().expect("consistent after presolve");
    let s = simplex::solve(&work, &opts());
    if s.status != Status::Optimal {
        return Reduced::Solved {
            status: s.status,
            objective: f64::NAN,
            max_violation: f64::NAN,
        };
    }
    let (x, obj) = stack.postsolve(&s.primal).expect("dimensions");
    Reduced::Solved {
        status: s.status,
        objective: obj,
        max_violation: lp.max_violation(&x),
    }
}

/// Checks reduce → solve → postsolve against the direct solve.
pub fn check_equivalent(lp: &LpProblem, ids: &[PresolverId]) -> Result<(), String> {
    let (status, obj) = reference(lp);
    match reduce_solve_postsolve(lp, ids) {
        Reduced::Infeasible(e) => {
            if status == Status::Infeasible {
                Ok(())
            } else {
                Err(format!("{e} but direct solve is {status}"))
            }
        }
        Reduced::Solved {
            status: rs,
            objective,
            max_violation,
        } => {
            if status == Status::IterationLimit || rs == Status::IterationLimit {
                return Err("iteration limit".into());
            }
            if rs != status {
                return Err(format!("reduced status {rs}, direct {status}"));
            }
            if status != Status::Optimal {
                return Ok(());
            }
            if !rel_close(objective, obj, 1e-6) {
                return Err(format!("objective {objective} vs direct {obj}"));
            }
            if max_violation > 1e-6 {
                return Err(format!("postsolved point violates by {max_violation}"));
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Markov-chain oracles.

/// Every sequence over `0..a` of length `0..=max_len`.
pub fn all_sequences(a: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for k in 0..a {
                let mut t: Vec<usize> = s.clone();
                t.push(k);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Probability that the chain emits `E` after at most `len` actions:
/// `p0[E] + Σ_{n=1}^{len} p0[:A] Qⁿ⁻¹ e`, with `Q` the action-to-action block
/// and `e` the end column.
pub fn absorbed_by(initial: &[f64], transition: &[Vec<f64>], len: usize) -> f64 {
    let a = transition.len();
    let mut mass = initial[a];
    let mut u: Vec<f64> = initial[..a].to_vec();
    for n in 1..=len {
        mass += (0..a).map(|i| u[i] * transition[i][a]).sum::<f64>();
        if n < len {
            u = (0..a)
                .map(|j| (0..a).map(|i| u[i] * transition[i][j]).sum())
                .collect();
        }
    }
    mass
}

/// Direct product of the factors of `seq` (ending with `E` unless it was
/// truncated at `cap`).
pub fn product_probability(initial: &[f64], transition: &[Vec<f64>], seq: &[usize], cap: usize) -> f64 {
    let a = transition.len();
    let mut p = 1.0;
    let mut prev: Option<usize> = None;
    for &k in seq {
        p *= match prev {
            None => initial[k],
            Some(i) => transition[i][k],
        };
        prev = Some(k);
    }
    if seq.len() < cap {
        p *= match prev {
            None => initial[a],
            Some(i) => transition[i][a],
        };
    }
    p
}

/// Reference clipped surrogate `min(r·Â, clip(r, 1−ε, 1+ε)·Â)`.
pub fn ppo_reference(r: f64, adv: f64, eps: f64) -> f64 {
    (r * adv).min(r.clamp(1.0 - eps, 1.0 + eps) * adv)
}
