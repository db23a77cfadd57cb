//! Baseline presolve routines, the evaluation protocol and rule extraction.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::CostModel;
use crate::env::{extract, EnvConfig, History, PresolveEnv, MAX_STEPS, NUM_FEATURES};
use crate::lp::{LpProblem, Status};
use crate::policy::{Agent, PolicyTables};
use crate::presolve::{self, PresolveStack, PresolverId};
use crate::simplex::{self, SolverOptions};
use crate::trainer::{run_episode, stream_rng, Start};

pub const DEFAULT_MAX_ITERATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutineKind {
    /// No presolve.
    Off,
    /// All presolvers in index order, in rounds, until a round reduces nothing.
    Default,
    /// The `percent`% presolvers with the largest profiled nnz reduction, run
    /// like `Default`.
    TopK,
    /// The `percent`% presolvers with the smallest profiled nnz reduction.
    LastK,
    /// Like `Default` with the order shuffled each round.
    Reordering,
    /// Like `Default` with the round limit scaled by `1 + percent/100`.
    IterationScaled,
    /// `sequence` executed once.
    Fixed,
    /// Sequences sampled from a trained agent.
    Learned,
}

fn default_max_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}

/// A presolve routine, also the on-disk JSON format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Routine {
    pub name: String,
    pub kind: RoutineKind,
    /// Presolvers for `Fixed`; the selected subset for `TopK`/`LastK` once
    /// resolved against a ranking.
    #[serde(default)]
    pub sequence: Vec<PresolverId>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid routine {name:?}: {msg}")]
    Routine { name: String, msg: String },
    #[error("routine {0:?} needs a presolver ranking")]
    MissingRanking(String),
    #[error("routine {0:?} needs a trained agent")]
    MissingAgent(String),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Mps(#[from] crate::mps::MpsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Routine {
    fn new(name: &str, kind: RoutineKind) -> Self {
        Routine {
            name: name.to_string(),
            kind,
            sequence: Vec::new(),
            max_iterations: DEFAULT_MAX_ITERATIONS,
            percent: None,
            seed: None,
            checkpoint: None,
        }
    }

    pub fn off() -> Self {
        Self::new("off", RoutineKind::Off)
    }

    pub fn default_routine() -> Self {
        Self::new("default", RoutineKind::Default)
    }

    pub fn fixed(name: &str, sequence: Vec<PresolverId>) -> Self {
        Routine {
            sequence,
            ..Self::new(name, RoutineKind::Fixed)
        }
    }

    pub fn top_k(percent: f64) -> Self {
        Routine {
            percent: Some(percent),
            ..Self::new(&format!("top{percent}"), RoutineKind::TopK)
        }
    }

    pub fn last_k(percent: f64) -> Self {
        Routine {
            percent: Some(percent),
            ..Self::new(&format!("last{percent}"), RoutineKind::LastK)
        }
    }

    pub fn iteration_scaled(percent: f64) -> Self {
        let name = if percent >= 0.0 {
            format!("iter+{percent}")
        } else {
            format!("iter{percent}")
        };
        Routine {
            percent: Some(percent),
            ..Self::new(&name, RoutineKind::IterationScaled)
        }
    }

    pub fn reordering(seed: u64) -> Self {
        Routine {
            seed: Some(seed),
            ..Self::new("reorder", RoutineKind::Reordering)
        }
    }

    pub fn learned(checkpoint: Option<PathBuf>) -> Self {
        Routine {
            checkpoint,
            ..Self::new("learned", RoutineKind::Learned)
        }
    }

    /// Named routines: `off`, `default`, `enhance-v1` (top 40%),
    /// `enhance-v2` (40% fewer rounds), `reorder`, `learned`, `topN`,
    /// `lastN` and `iter±N`.
    pub fn preset(name: &str) -> Option<Self> {
        let n = name.trim().to_ascii_lowercase();
        let pct = |s: &str| s.trim_end_matches('%').parse::<f64>().ok();
        let r = match n.as_str() {
            "off" | "presolve-off" | "none" => Self::off(),
            "default" => Self::default_routine(),
            "enhance-v1" => Routine {
                name: n.clone(),
                ..Self::top_k(40.0)
            },
            "enhance-v2" => Routine {
                name: n.clone(),
                ..Self::iteration_scaled(-40.0)
            },
            "reorder" | "reordering" => Self::reordering(0),
            "learned" => Self::learned(None),
            _ => {
                if let Some(p) = n.strip_prefix("top").and_then(pct) {
                    Self::top_k(p)
                } else if let Some(p) = n.strip_prefix("last").and_then(pct) {
                    Self::last_k(p)
                } else if let Some(p) = n.strip_prefix("iter").and_then(pct) {
                    Self::iteration_scaled(p)
                } else {
                    return None;
                }
            }
        };
        r.validate().ok()?;
        Some(r)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| {
            Err(HarnessError::Routine {
                name: self.name.clone(),
                msg: msg.to_string(),
            })
        };
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        match self.kind {
            RoutineKind::TopK | RoutineKind::LastK => match self.percent {
                Some(p) if p.is_finite() && p > 0.0 && p <= 100.0 => {}
                _ => return bad("percent must be in (0, 100]"),
            },
            RoutineKind::IterationScaled => match self.percent {
                Some(p) if p.is_finite() && p > -100.0 && p <= 1000.0 => {}
                _ => return bad("percent must be in (-100, 1000]"),
            },
            _ => {}
        }
        if self.kind == RoutineKind::Fixed && self.sequence.len() > MAX_STEPS * crate::env::MAX_SEQUENCE {
            return bad("sequence too long");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let r: Routine = serde_json::from_str(text)?;
        r.validate()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("routine serializes")
    }

    /// Number of presolvers a `TopK`/`LastK` routine keeps, rounding up.
    pub fn subset_size(percent: f64) -> usize {
        let n = PresolverId::ALL.len();
        ((percent / 100.0 * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize
    }

    /// Round limit after applying an `IterationScaled` percentage.
    pub fn effective_max_iterations(&self) -> usize {
        match (self.kind, self.percent) {
            (RoutineKind::IterationScaled, Some(p)) => {
                ((self.max_iterations as f64 * (1.0 + p / 100.0)).round() as usize).max(1)
            }
            _ => self.max_iterations,
        }
    }

    /// Fills `sequence` of a `TopK`/`LastK` routine from `ranking`, keeping
    /// the selected presolvers in index order.
    pub fn resolve(&self, ranking: Option<&Ranking>) -> Result<Routine, HarnessError> {
        self.validate()?;
        let mut r = self.clone();
        if matches!(r.kind, RoutineKind::TopK | RoutineKind::LastK) && r.sequence.is_empty() {
            let ranking = ranking.ok_or_else(|| HarnessError::MissingRanking(r.name.clone()))?;
            let k = Self::subset_size(r.percent.unwrap());
            let mut chosen: Vec<PresolverId> = if r.kind == RoutineKind::TopK {
                ranking.order[..k].to_vec()
            } else {
                ranking.order[ranking.order.len() - k..].to_vec()
            };
            chosen.sort_by_key(|p| p.index());
            r.sequence = chosen;
        }
        Ok(r)
    }

    /// Presolvers run in each round of a looping routine.
    fn round_order(&self) -> Vec<PresolverId> {
        match self.kind {
            RoutineKind::TopK | RoutineKind::LastK => self.sequence.clone(),
            _ => PresolverId::ALL.to_vec(),
        }
    }
}

/// Presolvers sorted by decreasing mean nnz reduction, ties by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub order: Vec<PresolverId>,
    /// Mean nnz removed per instance, by `PresolverId::index`.
    pub mean_reduction: Vec<f64>,
}

/// Runs each presolver once on each raw instance, independently.
pub fn profile(instances: &[LpProblem]) -> Ranking {
    let mut total = vec![0.0; PresolverId::ALL.len()];
    for lp in instances {
        for p in PresolverId::ALL {
            let mut work = lp.clone();
            let mut stack = PresolveStack::new(lp);
            let after = match presolve::apply(p, &mut work, &mut stack) {
                Ok(s) => s.nnz_after,
                Err(e) => e.stats.nnz_after,
            };
            total[p.index()] += (lp.nnz() - after) as f64;
        }
    }
    let n = instances.len().max(1) as f64;
    let mean: Vec<f64> = total.iter().map(|t| t / n).collect();
    let mut order = PresolverId::ALL.to_vec();
    order.sort_by(|a, b| {
        mean[b.index()]
            .partial_cmp(&mean[a.index()])
            .unwrap()
            .then(a.index().cmp(&b.index()))
    });
    Ranking {
        order,
        mean_reduction: mean,
    }
}

/// Result of running a routine's presolve phase.
#[derive(Debug, Clone)]
pub struct PresolveRun {
    pub lp: LpProblem,
    pub stack: PresolveStack,
    pub presolve_cost: f64,
    pub presolvers: usize,
    pub rounds: usize,
    pub infeasible: bool,
}

/// Presolve phase of a non-learned routine. `TopK`/`LastK` must be resolved.
pub fn run_presolve(routine: &Routine, lp: &LpProblem, cost: &CostModel) -> Result<PresolveRun, HarnessError> {
    routine.validate()?;
    let mut run = PresolveRun {
        lp: lp.clone(),
        stack: PresolveStack::new(lp),
        presolve_cost: 0.0,
        presolvers: 0,
        rounds: 0,
        infeasible: false,
    };
    let exec = |run: &mut PresolveRun, p: PresolverId| -> (bool, bool) {
        run.presolvers += 1;
        match presolve::apply(p, &mut run.lp, &mut run.stack) {
            Ok(s) => {
                run.presolve_cost += s.cost(cost);
                (s.reduced(), false)
            }
            Err(e) => {
                run.presolve_cost += e.stats.cost(cost);
                run.infeasible = true;
                (true, true)
            }
        }
    };
    match routine.kind {
        RoutineKind::Off => {}
        RoutineKind::Learned => return Err(HarnessError::MissingAgent(routine.name.clone())),
        RoutineKind::Fixed => {
            run.rounds = 1;
            for &p in &routine.sequence {
                if exec(&mut run, p).1 {
                    break;
                }
            }
        }
        RoutineKind::TopK | RoutineKind::LastK if routine.sequence.is_empty() => {
            return Err(HarnessError::MissingRanking(routine.name.clone()));
        }
        _ => {
            let mut order = routine.round_order();
            let mut rng = stream_rng(routine.seed.unwrap_or(0), 7, 0);
            for _ in 0..routine.effective_max_iterations() {
                if routine.kind == RoutineKind::Reordering {
                    order.shuffle(&mut rng);
                }
                run.rounds += 1;
                let mut any = false;
                for &p in &order {
                    let (reduced, infeasible) = exec(&mut run, p);
                    any |= reduced;
                    if infeasible {
                        return Ok(run);
                    }
                }
                if !any {
                    break;
                }
            }
        }
    }
    Ok(run)
}

/// One (instance, method) result, averaged over seeds where the method is
/// stochastic. `presolve_cost` includes policy decision cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub instance: String,
    pub method: String,
    pub cost: f64,
    pub presolve_cost: f64,
    pub lp_cost: f64,
    pub nnz_reduction_pct: f64,
    pub presolver_count: f64,
    pub status: Status,
    pub objective: Option<f64>,
}

/// Aggregates of one method over the instance set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub mean_cost: f64,
    /// Standard deviation over seeds of the per-seed mean cost.
    pub std_cost: f64,
    pub improvement_pct: f64,
    pub wins_pct: f64,
    pub mean_nnz_reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub baseline: String,
    pub rows: Vec<EvalRow>,
    pub summary: Vec<MethodSummary>,
}

pub const EVAL_HEADER: &str = "instance,method,cost,presolve_cost,lp_cost,nnz_reduction_pct,presolver_count";

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(EVAL_HEADER);
        s.push('\n');
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.instance, r.method, r.cost, r.presolve_cost, r.lp_cost, r.nnz_reduction_pct, r.presolver_count
            )
            .unwrap();
        }
        s
    }

    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<16} {:>14} {:>12} {:>15} {:>8} {:>10}\n",
            "method", "mean cost", "std", "improvement %", "wins %", "nnz red %"
        );
        for m in &self.summary {
            writeln!(
                s,
                "{:<16} {:>14.1} {:>12.1} {:>15.2} {:>8.1} {:>10.2}",
                m.method, m.mean_cost, m.std_cost, m.improvement_pct, m.wins_pct, m.mean_nnz_reduction_pct
            )
            .unwrap();
        }
        s
    }

    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.summary.iter().find(|m| m.method == name)
    }
}

/// A routine ready to run, with the agent for learned routines.
#[derive(Debug, Clone)]
pub enum Method {
    Routine(Routine),
    Learned { name: String, agent: Arc<Agent> },
}

impl Method {
    pub fn name(&self) -> &str {
        match self {
            Method::Routine(r) => &r.name,
            Method::Learned { name, .. } => name,
        }
    }

    fn stochastic(&self) -> bool {
        match self {
            Method::Routine(r) => r.kind == RoutineKind::Reordering,
            Method::Learned { .. } => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub cost: CostModel,
    pub solver: SolverOptions,
    pub seeds: Vec<u64>,
    pub threads: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            cost: CostModel::default(),
            solver: SolverOptions::default(),
            seeds: vec![0],
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Runs one method on one instance with one seed.
pub fn run_method(method: &Method, lp: &LpProblem, cfg: &EvalConfig, seed: u64) -> Result<EvalRow, HarnessError> {
    match method {
        Method::Learned { name, agent } => {
            let env_cfg = EnvConfig {
                cost: cfg.cost,
                mode: agent.mode,
                solver: cfg.solver.clone(),
                action_space: agent.action_space.clone(),
            };
            let mut env = PresolveEnv::new(Arc::new(vec![lp.clone()]), env_cfg);
            let mut rng = stream_rng(seed, 11, 0);
            let ep = run_episode(&mut env, agent, Start::Instance(0), 1.0, &mut rng);
            let s = ep.summary;
            Ok(EvalRow {
                instance: lp.name.clone(),
                method: name.clone(),
                cost: s.total_cost(),
                presolve_cost: s.presolve_cost + s.decision_cost,
                lp_cost: s.solve_cost,
                nnz_reduction_pct: s.nnz_reduction_pct(),
                presolver_count: s.presolvers_executed as f64,
                status: s.status.unwrap_or(Status::Infeasible),
                objective: s.objective,
            })
        }
        Method::Routine(r) => {
            let r = Routine {
                seed: r.seed.map(|s| s ^ seed).or(Some(seed)),
                ..r.clone()
            };
            let run = run_presolve(&r, lp, &cfg.cost)?;
            let nnz0 = lp.nnz();
            let nnz_red = if nnz0 == 0 {
                0.0
            } else {
                100.0 * (nnz0 - run.lp.nnz()) as f64 / nnz0 as f64
            };
            let (status, lp_cost, objective) = if run.infeasible {
                (Status::Infeasible, 0.0, None)
            } else {
                let rep = simplex::solve_report(&run.lp, &cfg.solver);
                let obj = if rep.solution.status == Status::Optimal {
                    run.stack.postsolve(&rep.solution.primal).ok().map(|(_, o)| o)
                } else {
                    None
                };
                (rep.solution.status, cfg.cost.solve_cost(&rep), obj)
            };
            Ok(EvalRow {
                instance: lp.name.clone(),
                method: r.name.clone(),
                cost: run.presolve_cost + lp_cost,
                presolve_cost: run.presolve_cost,
                lp_cost,
                nnz_reduction_pct: nnz_red,
                presolver_count: run.presolvers as f64,
                status,
                objective,
            })
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

/// Improvement of `cost` over `base` in percent.
pub fn improvement_pct(base: f64, cost: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        100.0 * (base - cost) / base
    }
}

/// Fraction of instances (in percent) on which each method's cost is within
/// 1e-9 of the instance minimum; tied methods all score.
pub fn wins_pct(costs: &[Vec<f64>]) -> Vec<f64> {
    let m = costs.len();
    let n = costs.first().map_or(0, |c| c.len());
    let mut wins = vec![0usize; m];
    for i in 0..n {
        let best = (0..m).map(|k| costs[k][i]).fold(f64::INFINITY, f64::min);
        for k in 0..m {
            if costs[k][i] - best <= 1e-9 {
                wins[k] += 1;
            }
        }
    }
    wins.iter().map(|&w| 100.0 * w as f64 / n.max(1) as f64).collect()
}

/// Evaluates every method on every instance. Methods that depend on a
/// seed are run once per seed and averaged. Improvement is relative to the
/// method named `default` if present, else the first method.
pub fn evaluate(methods: &[Method], instances: &[LpProblem], cfg: &EvalConfig) -> Result<EvalReport, HarnessError> {
    assert!(!methods.is_empty() && !instances.is_empty());
    assert!(!cfg.seeds.is_empty());
    let threads = cfg.threads.max(1).min(instances.len());
    // per_instance[i][k] = rows for method k over seeds.
    let chunk = instances.len().div_ceil(threads);
    let results: Vec<Result<Vec<Vec<Vec<EvalRow>>>, HarnessError>> = std::thread::scope(|s| {
        let hs: Vec<_> = instances
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|lp| {
                            methods
                                .iter()
                                .map(|m| {
                                    let seeds: &[u64] = if m.stochastic() { &cfg.seeds } else { &cfg.seeds[..1] };
                                    seeds.iter().map(|&sd| run_method(m, lp, cfg, sd)).collect()
                                })
                                .collect()
                        })
                        .collect()
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("evaluation worker panicked")).collect()
    });
    let mut per_instance = Vec::with_capacity(instances.len());
    for r in results {
        per_instance.extend(r?);
    }
    let mut rows = Vec::new();
    let mut costs = vec![Vec::new(); methods.len()];
    let mut nnz = vec![Vec::new(); methods.len()];
    // seed_means[k][s] = mean cost over instances with seed s.
    let mut seed_means = vec![vec![0.0; cfg.seeds.len()]; methods.len()];
    for runs in &per_instance {
        for (k, seed_rows) in runs.iter().enumerate() {
            let avg = |f: fn(&EvalRow) -> f64| mean(&seed_rows.iter().map(f).collect::<Vec<_>>());
            let first = &seed_rows[0];
            let row = EvalRow {
                cost: avg(|r| r.cost),
                presolve_cost: avg(|r| r.presolve_cost),
                lp_cost: avg(|r| r.lp_cost),
                nnz_reduction_pct: avg(|r| r.nnz_reduction_pct),
                presolver_count: avg(|r| r.presolver_count),
                ..first.clone()
            };
            for s in 0..cfg.seeds.len() {
                let r = seed_rows.get(s).unwrap_or(first);
                seed_means[k][s] += r.cost / instances.len() as f64;
            }
            costs[k].push(row.cost);
            nnz[k].push(row.nnz_reduction_pct);
            rows.push(row);
        }
    }
    let base = methods.iter().position(|m| m.name() == "default").unwrap_or(0);
    let base_mean = mean(&costs[base]);
    let wins = wins_pct(&costs);
    let summary = methods
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let mc = mean(&costs[k]);
            let sm = &seed_means[k];
            let mu = mean(sm);
            let sd = (sm.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / sm.len() as f64).sqrt();
            MethodSummary {
                method: m.name().to_string(),
                mean_cost: mc,
                std_cost: sd,
                improvement_pct: improvement_pct(base_mean, mc),
                wins_pct: wins[k],
                mean_nnz_reduction_pct: mean(&nnz[k]),
            }
        })
        .collect();
    Ok(EvalReport {
        baseline: methods[base].name().to_string(),
        rows,
        summary,
    })
}

/// Mean observation of `lps` under their histories.
fn mean_state(lps: &[LpProblem], hist: &[History]) -> Vec<f64> {
    let mut m = vec![0.0; NUM_FEATURES];
    for (lp, h) in lps.iter().zip(hist) {
        for (a, v) in m.iter_mut().zip(extract(lp, h)) {
            *a += v;
        }
    }
    m.iter_mut().for_each(|v| *v /= lps.len().max(1) as f64);
    m
}

/// Samples one full routine by playing the policy on the mean state of
/// `bench`: every sampled sequence is applied to all instances and the
/// next state is their new mean.
pub fn sample_routine(agent: &Agent, bench: &[LpProblem], seed: u64) -> Vec<PresolverId> {
    let mut rng = stream_rng(seed, 13, 0);
    let mut lps: Vec<LpProblem> = bench.to_vec();
    let mut stacks: Vec<PresolveStack> = bench.iter().map(PresolveStack::new).collect();
    let mut hist: Vec<History> = bench.iter().map(History::new).collect();
    let mut alive = vec![true; bench.len()];
    let mut routine = Vec::new();
    let cap = agent.sequence_cap();
    for step in 0..MAX_STEPS {
        let state = mean_state(&lps, &hist);
        let dist = agent.distribution(&state).expect("observation matches actor input");
        let seq = agent.to_presolvers(&dist.sample(cap, &mut rng).actions);
        if seq.is_empty() {
            break;
        }
        for k in 0..lps.len() {
            for &p in &seq {
                hist[k].record(p);
                if alive[k] && presolve::apply(p, &mut lps[k], &mut stacks[k]).is_err() {
                    alive[k] = false;
                }
            }
        }
        routine.extend(seq);
        if agent.mode == crate::env::AgentMode::Bandit || step + 1 == MAX_STEPS {
            break;
        }
    }
    routine
}

/// Samples `k` routines and returns the one with the lowest mean cost on
/// `validation` as a `Fixed` routine (earliest on ties).
pub fn extract_rules(
    agent: &Agent,
    bench: &[LpProblem],
    validation: &[LpProblem],
    k: usize,
    cfg: &EvalConfig,
    seed: u64,
) -> Result<(Routine, f64), HarnessError> {
    assert!(k > 0 && !validation.is_empty());
    let mut seen = HashSet::new();
    let mut best: Option<(Routine, f64)> = None;
    for s in 0..k as u64 {
        let seq = sample_routine(agent, bench, seed.wrapping_add(s));
        if !seen.insert(seq.clone()) {
            continue;
        }
        let r = Routine::fixed("extracted", seq);
        let m = Method::Routine(r.clone());
        let mut total = 0.0;
        for lp in validation {
            total += run_method(&m, lp, cfg, 0)?.cost;
        }
        let c = total / validation.len() as f64;
        if best.as_ref().map_or(true, |(_, b)| c < *b) {
            best = Some((r, c));
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Policy tables at the mean reset state of `bench`.
pub fn policy_tables(agent: &Agent, bench: &[LpProblem]) -> PolicyTables {
    let hist: Vec<History> = bench.iter().map(History::new).collect();
    agent
        .tables(&mean_state(bench, &hist))
        .expect("observation matches actor input")
}

/// Reads every `*.mps` file in `dir`, sorted by file name.
pub fn load_instances(dir: &Path) -> Result<Vec<LpProblem>, HarnessError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("mps")))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for p in paths {
        out.push(crate::mps::read_file(&p)?);
    }
    Ok(out)
}
