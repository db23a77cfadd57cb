mod common;

use common::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rl_presolve::lp::Status;
const STRESS: u64 = 500;
use rl_presolve::presolve::{self, PresolveStack, PresolverId};

fn feasible_bounded(seed: u64) -> rl_presolve::LpProblem {
    let mut r = rng(seed);
    loop {
        let lp = random_presolve_lp(&mut r, 10, 10);
        if reference(&lp).0 == Status::Optimal {
            return lp;
        }
    }
}

#[test]
fn each_presolver_preserves_optimum() {
    for seed in 0..STRESS {
        let lp = feasible_bounded(seed);
        for p in PresolverId::ALL {
            if let Err(e) = check_equivalent(&lp, &[p]) {
                panic!("seed {seed} presolver {p}: {e}\n{}", rl_presolve::mps::write_string(&lp));
            }
        }
    }
}

#[test]
fn random_sequences_preserve_optimum() {
    let mut r = rng(99);
    for seed in 0..STRESS {
        let lp = feasible_bounded(1000 + seed);
        let len = r.gen_range(2..30);
        let seq: Vec<PresolverId> = (0..len)
            .map(|_| *PresolverId::ALL.choose(&mut r).unwrap())
            .collect();
        if let Err(e) = check_equivalent(&lp, &seq) {
            panic!(
                "seed {seed} seq {:?}: {e}\n{}",
                seq.iter().map(|p| p.id()).collect::<Vec<_>>(),
                rl_presolve::mps::write_string(&lp)
            );
        }
    }
}

#[test]
fn unrestricted_problems_keep_status() {
    // Includes unbounded and infeasible problems.
    let mut r = rng(7);
    for seed in 0..STRESS {
        let lp = random_presolve_lp(&mut r, 8, 8);
        let seq: Vec<PresolverId> = PresolverId::ALL.iter().copied().cycle().take(36).collect();
        if let Err(e) = check_equivalent(&lp, &seq) {
            panic!("case {seed}: {e}\n{}", rl_presolve::mps::write_string(&lp));
        }
    }
}

#[test]
fn infeasible_problems_are_never_reported_feasible() {
    let mut r = rng(11);
    let mut seen = 0;
    while seen < 100 {
        let lp = random_small_lp(&mut r, 5, 5);
        if reference(&lp).0 != Status::Infeasible {
            continue;
        }
        seen += 1;
        for p in PresolverId::ALL {
            check_equivalent(&lp, &[p]).unwrap();
        }
    }
}

#[test]
fn nnz_never_increases() {
    let mut r = rng(3);
    for _ in 0..400 {
        let lp = random_presolve_lp(&mut r, 10, 10);
        let mut work = lp.clone();
        let mut stack = PresolveStack::new(&lp);
        for _ in 0..20 {
            let p = *PresolverId::ALL.choose(&mut r).unwrap();
            let before = work.nnz();
            match presolve::apply(p, &mut work, &mut stack) {
                Ok(s) => {
                    assert_eq!(s.nnz_before, before);
                    assert!(s.nnz_after <= s.nnz_before, "{p} grew nnz");
                    assert_eq!(s.nnz_after, work.nnz());
                }
                Err(e) => {
                    assert!(e.stats.nnz_after <= before);
                    break;
                }
            }
        }
    }
}

#[test]
fn corpus_activates_every_presolver() {
    let mut applied = [0u64; 12];
    let mut r = rng(5);
    for _ in 0..300 {
        let lp = random_presolve_lp(&mut r, 10, 10);
        for p in PresolverId::ALL {
            let mut work = lp.clone();
            let mut stack = PresolveStack::new(&lp);
            if let Ok(s) = presolve::apply(p, &mut work, &mut stack) {
                applied[p.index()] += s.work.applied;
            }
        }
    }
    for p in PresolverId::ALL {
        assert!(applied[p.index()] > 0, "{p} never applied");
    }
    eprintln!("{applied:?}");
}
