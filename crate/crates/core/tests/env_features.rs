mod common;

use std::sync::Arc;

use common::*;
use rl_presolve::env::features::{counts, static_features, ACTION_HISTORY, NUM_STATIC};
use rl_presolve::env::{
    extract, AgentMode, EnvConfig, Environment, History, PresolveEnv, FEATURE_NAMES, MAX_STEPS, NUM_FEATURES,
};
use rl_presolve::instancegen::{generate_indexed, Family, GenSpec};
use rl_presolve::lp::Status;
use rl_presolve::presolve::{self, PresolveStack, PresolverId};
use rl_presolve::LpProblem;

/// Structural entries recounted from the row triples.
fn structural_oracle(lp: &LpProblem) -> Vec<(usize, f64)> {
    let mut row_len = vec![0usize; lp.row_capacity()];
    for (i, _, _) in lp.triples_by_row() {
        row_len[i] += 1;
    }
    let rows: Vec<usize> = lp.active_rows().collect();
    let eqs: Vec<usize> = rows.iter().copied().filter(|&i| lp.row_lower(i) == lp.row_upper(i)).collect();
    let ineqs: Vec<usize> = rows.iter().copied().filter(|&i| lp.row_lower(i) != lp.row_upper(i)).collect();
    let div = |a: usize, b: usize| a as f64 / b.max(1) as f64;
    let deg = |set: &[usize], d: usize| set.iter().filter(|&&i| row_len[i] == d).count();
    let n = lp.active_cols().count();
    let mut out = Vec::new();
    for d in 1..=4 {
        out.push((d - 1, div(deg(&eqs, d), eqs.len())));
        out.push((4 + d, div(deg(&ineqs, d), ineqs.len())));
    }
    out.push((10, div(eqs.len(), rows.len())));
    out.push((11, div(ineqs.len(), rows.len())));
    out.push((12, div(n, rows.len())));
    out.push((17, div(lp.triples_by_row().len(), rows.len().max(1) * n.max(1))));
    out
}

fn corpus() -> Vec<LpProblem> {
    let mut r = rng(31);
    let mut lps: Vec<LpProblem> = (0..200).map(|_| random_presolve_lp(&mut r, 10, 10)).collect();
    for (name, params) in [
        ("redundancy_heavy", "nrow=20,ncol=30,dens=0.1"),
        ("set_covering", "nrow=20,ncol=40,dens=0.1"),
    ] {
        let spec = GenSpec {
            family: Family::parse(name, params).unwrap(),
            seed: 2,
        };
        lps.extend((0..5).map(|k| generate_indexed(&spec, k).unwrap()));
    }
    lps
}

#[test]
fn names_follow_the_documented_order() {
    assert_eq!(NUM_FEATURES, 51);
    assert_eq!(FEATURE_NAMES.len(), 51);
    for k in 0..NUM_STATIC {
        assert_eq!(FEATURE_NAMES[NUM_STATIC + k], format!("d_{}", FEATURE_NAMES[k]));
    }
    assert_eq!(FEATURE_NAMES[0], "eq_deg1");
    assert_eq!(FEATURE_NAMES[17], "nnz");
    assert_eq!(FEATURE_NAMES[ACTION_HISTORY], "exec_make_fixed");
    assert_eq!(FEATURE_NAMES[50], "exec_unsupported_14");
}

#[test]
fn structural_entries_match_recount() {
    for lp in corpus() {
        let f = extract(&lp, &History::new(&lp));
        for (k, v) in structural_oracle(&lp) {
            assert_eq!(f[k], v, "{} entry {k}", lp.name);
        }
        assert!(f[NUM_STATIC..ACTION_HISTORY].iter().all(|&d| d == 0.0));
        assert!(f[ACTION_HISTORY..].iter().all(|&d| d == 0.0));
    }
}

#[test]
fn deltas_and_history_after_presolve() {
    for lp in corpus() {
        let hist = History::new(&lp);
        let mut h = hist.clone();
        let mut work = lp.clone();
        let mut stack = PresolveStack::new(&lp);
        let seq = [PresolverId::MakeFixed, PresolverId::DupRow, PresolverId::MakeFixed];
        for p in seq {
            h.record(p);
            if presolve::apply(p, &mut work, &mut stack).is_err() {
                break;
            }
        }
        let f = extract(&work, &h);
        let now = static_features(&work);
        for k in 0..NUM_STATIC {
            assert_eq!(f[k], now[k]);
            assert_eq!(f[NUM_STATIC + k], now[k] - hist.at_reset[k]);
        }
        assert_eq!(f[ACTION_HISTORY], 2.0);
        assert_eq!(f[ACTION_HISTORY + 4], 1.0);
        for (k, v) in structural_oracle(&work) {
            assert_eq!(f[k], v);
        }
    }
}

#[test]
fn row_classes_agree_with_presolvers() {
    let mut forcing_seen = 0;
    let mut redundant_seen = 0;
    for lp in corpus() {
        let c = counts(&lp);
        let rows = lp.num_rows();
        let removed = |p: PresolverId| -> Option<usize> {
            let mut work = lp.clone();
            let mut stack = PresolveStack::new(&lp);
            presolve::apply(p, &mut work, &mut stack).ok().map(|_| rows - work.num_rows())
        };
        if let Some(r) = removed(PresolverId::TestRedundant) {
            assert!(r >= c.redundant, "{}: removed {r} < counted {}", lp.name, c.redundant);
            redundant_seen += c.redundant;
        }
        if let Some(r) = removed(PresolverId::Forcing) {
            assert_eq!(r > 0, c.forcing_lower + c.forcing_upper > 0, "{}", lp.name);
            forcing_seen += c.forcing_lower + c.forcing_upper;
        }
    }
    assert!(forcing_seen > 0 && redundant_seen > 0);
}

fn redundant_env(mode: AgentMode) -> PresolveEnv {
    let spec = GenSpec {
        family: Family::parse("redundancy_heavy", "nrow=20,ncol=30,dens=0.1").unwrap(),
        seed: 5,
    };
    let lps = (0..2).map(|k| generate_indexed(&spec, k).unwrap()).collect();
    PresolveEnv::new(
        Arc::new(lps),
        EnvConfig {
            mode,
            ..EnvConfig::default()
        },
    )
}

#[test]
fn step_limit_forces_a_solve() {
    let mut env = redundant_env(AgentMode::Full);
    env.reset_instance(0);
    let mut steps = 0;
    loop {
        let out = env.step(&[PresolverId::MakeFixed]);
        steps += 1;
        assert!(out.reward <= 0.0);
        if out.done {
            break;
        }
        assert_eq!(out.obs.unwrap().len(), NUM_FEATURES);
    }
    assert_eq!(steps, MAX_STEPS);
    let s = env.summary();
    assert_eq!(s.status, Some(Status::Optimal));
    assert!(s.solve_cost > 0.0);
    assert_eq!(s.decisions, MAX_STEPS);
}

#[test]
fn long_actions_are_truncated() {
    let mut env = redundant_env(AgentMode::Full);
    env.reset_instance(1);
    env.step(&[PresolverId::MakeFixed; 100]);
    assert_eq!(env.summary().presolvers_executed, 64);
    assert_eq!(AgentMode::Vanilla.sequence_cap(), 1);
}

#[test]
fn infeasibility_ends_the_episode() {
    let mut lp = LpProblem::new("infeasible");
    let x = lp.add_col("x", 1.0, 0.0, 1.0).unwrap();
    lp.add_row("r", 5.0, f64::INFINITY, &[(x, 1.0)]).unwrap();
    let mut env = PresolveEnv::new(Arc::new(vec![lp]), EnvConfig::default());
    env.reset_instance(0);
    let out = env.step(&PresolverId::ALL);
    assert!(out.done && out.obs.is_none());
    assert!(out.reward < 0.0);
    let s = env.summary();
    assert_eq!(s.status, Some(Status::Infeasible));
    assert_eq!(s.solve_cost, 0.0);
    assert!(s.presolvers_executed < PresolverId::ALL.len());
}

#[test]
fn episode_return_is_total_cost() {
    let mut env = redundant_env(AgentMode::Full);
    env.reset_instance(0);
    let mut ret = 0.0;
    ret += env.step(&[PresolverId::DupRow, PresolverId::TestRedundant]).reward;
    ret += env.step(&[PresolverId::Doubleton]).reward;
    let last = env.step(&[]);
    ret += last.reward;
    assert!(last.done);
    assert!((-ret - env.summary().total_cost()).abs() <= 1e-9 * ret.abs());
    assert!(env.summary().nnz_final < env.summary().nnz_initial);
}
