//! Every checked-in fuzz seed must be accepted by its parser, so the seeds
//! start the fuzzers inside the valid input space.

use std::path::{Path, PathBuf};

use rl_presolve::env::trace;
use rl_presolve::harness::Routine;
use rl_presolve::instancegen::Family;
use rl_presolve::policy::Checkpoint;
use rl_presolve::trainer::TrainerConfig;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn mps_seeds_parse() {
    for (p, text) in seeds("mps_read") {
        let lp = rl_presolve::mps::read_str(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert!(lp.nnz() > 0);
    }
}

#[test]
fn routine_seeds_parse() {
    for (p, text) in seeds("routine_json") {
        Routine::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn checkpoint_seeds_parse() {
    for (p, text) in seeds("checkpoint_json") {
        Checkpoint::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn config_seeds_parse() {
    for (p, text) in seeds("trainer_config_toml") {
        TrainerConfig::from_toml(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn trace_seeds_parse() {
    for (p, text) in seeds("trace_jsonl") {
        assert!(!trace::read_str(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display())).is_empty());
    }
}

#[test]
fn family_seeds_parse() {
    for (p, text) in seeds("family_params") {
        let (name, params) = text.split_once('\n').unwrap();
        Family::parse(name, params).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
