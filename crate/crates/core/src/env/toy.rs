//! Two-armed toy environment: running the beneficial presolver costs 1 and
//! makes the following solve cost 1; solving straight away costs 5.

use rand_chacha::ChaCha8Rng;

use super::{AgentMode, EpisodeSummary, Environment, StepOutcome, MAX_SEQUENCE, MAX_STEPS};
use super::features::{ACTION_HISTORY, NUM_FEATURES};
use crate::lp::Status;
use crate::presolve::PresolverId;

pub const PRESOLVE_COST: f64 = 1.0;
pub const CHEAP_SOLVE: f64 = 1.0;
pub const DIRECT_SOLVE: f64 = 5.0;

/// The first presolver of the action space is the beneficial one; any other
/// presolver costs the same and does nothing.
#[derive(Debug, Clone)]
pub struct TwoArmedEnv {
    space: Vec<PresolverId>,
    mode: AgentMode,
    presolved: bool,
    executed: [u32; 15],
    done: bool,
    summary: EpisodeSummary,
}

impl TwoArmedEnv {
    pub fn new(space: Vec<PresolverId>) -> Self {
        assert!(!space.is_empty());
        TwoArmedEnv {
            space,
            mode: AgentMode::Full,
            presolved: false,
            executed: [0; 15],
            done: true,
            summary: EpisodeSummary::default(),
        }
    }

    pub fn with_mode(mut self, mode: AgentMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn beneficial(&self) -> PresolverId {
        self.space[0]
    }

    fn obs(&self) -> Vec<f64> {
        let mut o = vec![0.0; NUM_FEATURES];
        o[0] = if self.presolved { 0.0 } else { 1.0 };
        for (k, &n) in self.executed.iter().enumerate() {
            o[ACTION_HISTORY + k] = n as f64;
        }
        o
    }

    fn solve(&mut self) -> f64 {
        let c = if self.presolved { CHEAP_SOLVE } else { DIRECT_SOLVE };
        self.summary.solve_cost += c;
        self.summary.status = Some(Status::Optimal);
        self.done = true;
        c
    }
}

impl Environment for TwoArmedEnv {
    fn obs_dim(&self) -> usize {
        NUM_FEATURES
    }

    fn action_space(&self) -> &[PresolverId] {
        &self.space
    }

    fn mode(&self) -> AgentMode {
        self.mode
    }

    fn reset(&mut self, _rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.reset_instance(0)
    }

    fn instance_count(&self) -> usize {
        1
    }

    fn reset_instance(&mut self, _index: usize) -> Vec<f64> {
        self.presolved = false;
        self.executed = [0; 15];
        self.done = false;
        self.summary = EpisodeSummary {
            instance: "two_armed".into(),
            ..EpisodeSummary::default()
        };
        self.obs()
    }

    fn step(&mut self, action: &[PresolverId]) -> StepOutcome {
        assert!(!self.done, "step after episode end");
        self.summary.steps += 1;
        self.summary.decisions += 1;
        if action.is_empty() {
            let c = self.solve();
            return StepOutcome {
                obs: None,
                reward: -c,
                done: true,
            };
        }
        let mut cost = 0.0;
        for &p in &action[..action.len().min(MAX_SEQUENCE)] {
            cost += PRESOLVE_COST;
            self.executed[p.id() as usize] += 1;
            self.summary.presolvers_executed += 1;
            self.summary.sequence.push(p);
            if p == self.beneficial() {
                self.presolved = true;
            }
        }
        self.summary.presolve_cost += cost;
        if self.mode == AgentMode::Bandit || self.summary.steps >= MAX_STEPS {
            cost += self.solve();
            return StepOutcome {
                obs: None,
                reward: -cost,
                done: true,
            };
        }
        StepOutcome {
            obs: Some(self.obs()),
            reward: -cost,
            done: false,
        }
    }

    fn summary(&self) -> &EpisodeSummary {
        &self.summary
    }
}
