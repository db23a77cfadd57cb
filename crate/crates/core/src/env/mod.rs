//! Presolve as an episodic decision process.
//!
//! Each step the agent submits a presolver sequence. A non-empty sequence is
//! executed and charged its presolve cost plus one decision; the empty
//! sequence ends presolve, solves the reduced problem and charges the solve
//! cost plus one decision. With `γ = 1` the negated episode return is the
//! total accounted cost.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::lp::{LpProblem, Status};
use crate::presolve::{self, PresolveStack, PresolverId};
use crate::simplex::{self, SolverOptions};

pub mod features;
pub mod toy;
pub mod trace;

pub use features::{extract, History, FEATURE_NAMES, NUM_FEATURES};
pub use toy::TwoArmedEnv;

/// Presolvers executed per step at most; longer actions are truncated.
pub const MAX_SEQUENCE: usize = 64;
/// Steps per episode at most; the step that reaches it also solves.
pub const MAX_STEPS: usize = 100;

/// Agent variants sharing one environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentMode {
    /// Adaptive sequences over many steps.
    #[default]
    Full,
    /// One sequence, then the episode ends with a solve.
    Bandit,
    /// Sequences of length one.
    Vanilla,
}

impl std::str::FromStr for AgentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(AgentMode::Full),
            "bandit" => Ok(AgentMode::Bandit),
            "vanilla" => Ok(AgentMode::Vanilla),
            other => Err(format!("unknown agent mode {other:?}")),
        }
    }
}

impl AgentMode {
    pub fn sequence_cap(self) -> usize {
        match self {
            AgentMode::Vanilla => 1,
            _ => MAX_SEQUENCE,
        }
    }
}

/// Result of one `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// Next observation; `None` once done.
    pub obs: Option<Vec<f64>>,
    /// Always ≤ 0.
    pub reward: f64,
    pub done: bool,
}

/// Accounting of a finished or running episode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub instance: String,
    pub steps: usize,
    pub decisions: usize,
    pub presolvers_executed: usize,
    pub presolve_cost: f64,
    pub solve_cost: f64,
    pub decision_cost: f64,
    pub nnz_initial: usize,
    pub nnz_final: usize,
    pub status: Option<Status>,
    /// Objective of the original problem at the postsolved solution.
    pub objective: Option<f64>,
    pub sequence: Vec<PresolverId>,
}

impl EpisodeSummary {
    pub fn total_cost(&self) -> f64 {
        self.presolve_cost + self.solve_cost + self.decision_cost
    }

    pub fn nnz_reduction_pct(&self) -> f64 {
        if self.nnz_initial == 0 {
            0.0
        } else {
            100.0 * (self.nnz_initial - self.nnz_final) as f64 / self.nnz_initial as f64
        }
    }
}

/// What the trainer needs from an environment.
pub trait Environment: Send {
    fn obs_dim(&self) -> usize;
    /// Presolvers the agent may choose from, in action-index order.
    fn action_space(&self) -> &[PresolverId];
    fn mode(&self) -> AgentMode;
    /// Starts an episode on an instance drawn with `rng`.
    fn reset(&mut self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    /// Number of instances addressable by `reset_instance`.
    fn instance_count(&self) -> usize;
    fn reset_instance(&mut self, index: usize) -> Vec<f64>;
    fn step(&mut self, action: &[PresolverId]) -> StepOutcome;
    fn summary(&self) -> &EpisodeSummary;
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub cost: CostModel,
    pub mode: AgentMode,
    pub solver: SolverOptions,
    pub action_space: Vec<PresolverId>,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            cost: CostModel::default(),
            mode: AgentMode::Full,
            solver: SolverOptions::default(),
            action_space: PresolverId::ALL.to_vec(),
        }
    }
}

#[derive(Clone)]
struct Episode {
    lp: LpProblem,
    stack: PresolveStack,
    history: History,
    done: bool,
}

/// Episodes over a shared pool of instances.
#[derive(Clone)]
pub struct PresolveEnv {
    instances: Arc<Vec<LpProblem>>,
    cfg: EnvConfig,
    episode: Option<Episode>,
    summary: EpisodeSummary,
}

impl PresolveEnv {
    pub fn new(instances: Arc<Vec<LpProblem>>, cfg: EnvConfig) -> Self {
        assert!(!instances.is_empty(), "environment needs at least one instance");
        PresolveEnv {
            instances,
            cfg,
            episode: None,
            summary: EpisodeSummary::default(),
        }
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn instances(&self) -> &[LpProblem] {
        &self.instances
    }

    /// Starts an episode on an arbitrary problem.
    pub fn reset_with(&mut self, lp: &LpProblem) -> Vec<f64> {
        let history = History::new(lp);
        let obs = extract(lp, &history);
        self.summary = EpisodeSummary {
            instance: lp.name.clone(),
            nnz_initial: lp.nnz(),
            nnz_final: lp.nnz(),
            ..EpisodeSummary::default()
        };
        self.episode = Some(Episode {
            stack: PresolveStack::new(lp),
            lp: lp.clone(),
            history,
            done: false,
        });
        obs
    }

    /// Current (partially presolved) problem.
    pub fn current(&self) -> Option<LpProblem> {
        self.episode.as_ref().map(|e| e.lp.clone())
    }

    fn finish_solve(&mut self, ep: &mut Episode) -> f64 {
        let report = simplex::solve_report(&ep.lp, &self.cfg.solver);
        let cost = self.cfg.cost.solve_cost(&report);
        self.summary.solve_cost += cost;
        self.summary.status = Some(report.solution.status);
        if report.solution.status == Status::Optimal {
            if let Ok((_, obj)) = ep.stack.postsolve(&report.solution.primal) {
                self.summary.objective = Some(obj);
            }
        }
        ep.done = true;
        cost
    }
}

impl Environment for PresolveEnv {
    fn obs_dim(&self) -> usize {
        NUM_FEATURES
    }

    fn action_space(&self) -> &[PresolverId] {
        &self.cfg.action_space
    }

    fn mode(&self) -> AgentMode {
        self.cfg.mode
    }

    fn reset(&mut self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let k = rng.gen_range(0..self.instances.len());
        self.reset_instance(k)
    }

    fn instance_count(&self) -> usize {
        self.instances.len()
    }

    fn reset_instance(&mut self, index: usize) -> Vec<f64> {
        let instances = Arc::clone(&self.instances);
        self.reset_with(&instances[index])
    }

    fn step(&mut self, action: &[PresolverId]) -> StepOutcome {
        let mut ep = self.episode.take().expect("step before reset");
        assert!(!ep.done, "step after episode end");
        let out = self.step_inner(&mut ep, action);
        self.episode = Some(ep);
        out
    }

    fn summary(&self) -> &EpisodeSummary {
        &self.summary
    }
}

impl PresolveEnv {
    fn step_inner(&mut self, ep: &mut Episode, action: &[PresolverId]) -> StepOutcome {
        let start = Instant::now();
        self.summary.steps += 1;
        self.summary.decisions += 1;
        let action = &action[..action.len().min(MAX_SEQUENCE)];
        let mut cost = 0.0;
        if action.is_empty() {
            let decision = self.cfg.cost.decision_cost(start.elapsed().as_secs_f64());
            self.summary.decision_cost += decision;
            cost += decision + self.finish_solve(ep);
            return StepOutcome {
                obs: None,
                reward: -cost,
                done: true,
            };
        }
        let mut infeasible = false;
        for &p in action {
            let Episode { lp, stack, history, .. } = &mut *ep;
            let result = presolve::apply(p, lp, stack);
            history.record(p);
            self.summary.presolvers_executed += 1;
            self.summary.sequence.push(p);
            let stats = match &result {
                Ok(s) => s.clone(),
                Err(e) => e.stats.clone(),
            };
            let c = stats.cost(&self.cfg.cost);
            self.summary.presolve_cost += c;
            cost += c;
            if result.is_err() {
                infeasible = true;
                break;
            }
        }
        self.summary.nnz_final = ep.lp.nnz();
        let obs = if infeasible {
            None
        } else {
            Some(extract(&ep.lp, &ep.history))
        };
        let decision = self.cfg.cost.decision_cost(start.elapsed().as_secs_f64());
        self.summary.decision_cost += decision;
        cost += decision;
        if infeasible {
            self.summary.status = Some(Status::Infeasible);
            ep.done = true;
            return StepOutcome {
                obs: None,
                reward: -cost,
                done: true,
            };
        }
        let forced = self.cfg.mode == AgentMode::Bandit || self.summary.steps >= MAX_STEPS;
        if forced {
            cost += self.finish_solve(ep);
            return StepOutcome {
                obs: None,
                reward: -cost,
                done: true,
            };
        }
        StepOutcome {
            obs,
            reward: -cost,
            done: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn tiny() -> LpProblem {
        let mut lp = LpProblem::new("tiny");
        lp.add_col("x", 1.0, 0.0, 4.0).unwrap();
        lp.add_col("y", 2.0, 1.0, 1.0).unwrap();
        lp.add_row("r", 2.0, f64::INFINITY, &[(0, 1.0), (1, 1.0)])
            .unwrap();
        lp
    }

    #[test]
    fn empty_action_solves() {
        let mut env = PresolveEnv::new(Arc::new(vec![tiny()]), EnvConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        env.reset(&mut rng);
        let out = env.step(&[]);
        assert!(out.done && out.obs.is_none());
        let s = env.summary();
        assert_eq!(out.reward, -(s.solve_cost + s.decision_cost));
        assert_eq!(s.status, Some(Status::Optimal));
        assert_eq!(s.objective, Some(3.0));
    }

    #[test]
    fn return_equals_total_cost() {
        let mut env = PresolveEnv::new(Arc::new(vec![tiny()]), EnvConfig::default());
        env.reset_instance(0);
        let mut ret = 0.0;
        let a = env.step(&[PresolverId::MakeFixed, PresolverId::SlackDoubleton]);
        ret += a.reward;
        assert!(!a.done);
        let b = env.step(&[]);
        ret += b.reward;
        assert!(b.done);
        assert_eq!(-ret, env.summary().total_cost());
        assert_eq!(env.summary().objective, Some(3.0));
    }

    #[test]
    fn bandit_ends_after_one_step() {
        let cfg = EnvConfig {
            mode: AgentMode::Bandit,
            ..EnvConfig::default()
        };
        let mut env = PresolveEnv::new(Arc::new(vec![tiny()]), cfg);
        env.reset_instance(0);
        let out = env.step(&[PresolverId::MakeFixed]);
        assert!(out.done);
        assert!(env.summary().solve_cost > 0.0);
    }
}
