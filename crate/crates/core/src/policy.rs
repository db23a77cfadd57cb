//! Adaptive action sequences: a state-conditioned Markov chain over the
//! action space with an end token `E`.
//!
//! One actor pass yields `A + 1` initial logits and an `A × (A + 1)`
//! transition table; a whole presolver sequence is then sampled without
//! further network calls. The end token is always the last index.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{AgentMode, MAX_SEQUENCE};
use crate::nn::{Mlp, NnError, RunningNormalizer};
use crate::presolve::PresolverId;

/// Number of actor outputs for an action space of size `a`.
pub fn logit_count(a: usize) -> usize {
    (a + 1) + a * (a + 1)
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn log_softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    z.iter().map(|v| v - lse).collect()
}

fn entropy_of(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

/// Adds `∂L/∂z` to `out` given `∂L/∂p` for `p = softmax(z)`.
fn softmax_backward(p: &[f64], dp: &[f64], out: &mut [f64]) {
    let dot: f64 = p.iter().zip(dp).map(|(a, b)| a * b).sum();
    for k in 0..p.len() {
        out[k] += p[k] * (dp[k] - dot);
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("row {row} is not a probability vector")]
    NotStochastic { row: usize },
}

/// `initial[k]` and `transition[i][k]` for `k ∈ 0..=A`, `k = A` being `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainDistribution {
    a: usize,
    initial: Vec<f64>,
    transition: Vec<f64>,
    log_initial: Vec<f64>,
    log_transition: Vec<f64>,
}

/// A sampled sequence of action indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSequence {
    pub actions: Vec<usize>,
    pub log_prob: f64,
    /// Stopped by the length cap rather than by `E`.
    pub truncated: bool,
}

impl ChainDistribution {
    pub fn from_logits(a: usize, logits: &[f64]) -> Result<Self, ChainError> {
        if logits.len() != logit_count(a) {
            return Err(ChainError::Shape {
                expected: logit_count(a),
                got: logits.len(),
            });
        }
        let w = a + 1;
        let initial = softmax(&logits[..w]);
        let log_initial = log_softmax(&logits[..w]);
        let mut transition = Vec::with_capacity(a * w);
        let mut log_transition = Vec::with_capacity(a * w);
        for i in 0..a {
            let row = &logits[w + i * w..w + (i + 1) * w];
            transition.extend(softmax(row));
            log_transition.extend(log_softmax(row));
        }
        Ok(ChainDistribution {
            a,
            initial,
            transition,
            log_initial,
            log_transition,
        })
    }

    /// From explicit probability tables; each row must sum to 1 within 1e-9.
    pub fn from_probs(initial: Vec<f64>, transition: Vec<Vec<f64>>) -> Result<Self, ChainError> {
        let a = initial.len().saturating_sub(1);
        if initial.is_empty() {
            return Err(ChainError::Shape {
                expected: 1,
                got: 0,
            });
        }
        if transition.len() != a {
            return Err(ChainError::Shape {
                expected: a,
                got: transition.len(),
            });
        }
        let check = |row: &[f64], k: usize| -> Result<(), ChainError> {
            if row.len() != a + 1 {
                return Err(ChainError::Shape {
                    expected: a + 1,
                    got: row.len(),
                });
            }
            let s: f64 = row.iter().sum();
            if row.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) || (s - 1.0).abs() > 1e-9 {
                return Err(ChainError::NotStochastic { row: k });
            }
            Ok(())
        };
        check(&initial, 0)?;
        for (i, r) in transition.iter().enumerate() {
            check(r, i + 1)?;
        }
        let ln = |v: &f64| v.ln();
        Ok(ChainDistribution {
            a,
            log_initial: initial.iter().map(ln).collect(),
            log_transition: transition.iter().flatten().map(ln).collect(),
            initial,
            transition: transition.into_iter().flatten().collect(),
        })
    }

    pub fn num_actions(&self) -> usize {
        self.a
    }

    pub fn end(&self) -> usize {
        self.a
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Row `i` of the transition table.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.transition[i * (self.a + 1)..(i + 1) * (self.a + 1)]
    }

    fn log_row(&self, i: usize) -> &[f64] {
        &self.log_transition[i * (self.a + 1)..(i + 1) * (self.a + 1)]
    }

    fn draw<R: Rng>(p: &[f64], rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (k, &v) in p.iter().enumerate() {
            acc += v;
            if u < acc {
                return k;
            }
        }
        // Rounding left `u` above the cumulative sum: take the last positive entry.
        p.iter().rposition(|&v| v > 0.0).unwrap_or(p.len() - 1)
    }

    /// Draws a sequence of at most `cap` actions.
    pub fn sample<R: Rng>(&self, cap: usize, rng: &mut R) -> SampledSequence {
        let mut actions = Vec::new();
        if cap == 0 {
            return SampledSequence {
                actions,
                log_prob: 0.0,
                truncated: true,
            };
        }
        let mut k = Self::draw(&self.initial, rng);
        let mut lp = self.log_initial[k];
        while k != self.end() {
            actions.push(k);
            if actions.len() == cap {
                return SampledSequence {
                    actions,
                    log_prob: lp,
                    truncated: true,
                };
            }
            let prev = k;
            k = Self::draw(self.row(prev), rng);
            lp += self.log_row(prev)[k];
        }
        SampledSequence {
            actions,
            log_prob: lp,
            truncated: false,
        }
    }

    /// The factors `(row, index)` whose logs sum to the sequence log-probability;
    /// `row = None` is the initial distribution.
    fn factors(&self, seq: &[usize], cap: usize) -> Vec<(Option<usize>, usize)> {
        assert!(seq.len() <= cap, "sequence longer than cap");
        assert!(seq.iter().all(|&k| k < self.a), "action index out of range");
        let mut out = Vec::with_capacity(seq.len() + 1);
        let mut prev = None;
        for &k in seq {
            out.push((prev, k));
            prev = Some(k);
        }
        if seq.len() < cap {
            out.push((prev, self.end()));
        }
        out
    }

    /// Log-probability of `seq` under sampling with length cap `cap`.
    pub fn log_prob(&self, seq: &[usize], cap: usize) -> f64 {
        self.factors(seq, cap)
            .into_iter()
            .map(|(r, k)| match r {
                None => self.log_initial[k],
                Some(i) => self.log_row(i)[k],
            })
            .sum()
    }

    /// Adds `scale · ∂ log_prob / ∂ logits` to `out`.
    pub fn log_prob_grad(&self, seq: &[usize], cap: usize, scale: f64, out: &mut [f64]) {
        let w = self.a + 1;
        assert_eq!(out.len(), logit_count(self.a));
        for (r, k) in self.factors(seq, cap) {
            let (p, off) = match r {
                None => (&self.initial[..], 0),
                Some(i) => (self.row(i), w + i * w),
            };
            for j in 0..w {
                let ind = if j == k { 1.0 } else { 0.0 };
                out[off + j] += scale * (ind - p[j]);
            }
        }
    }

    /// Expected number of times each transition row is drawn when sampling
    /// with cap `cap`.
    pub fn visits(&self, cap: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.a];
        let mut u: Vec<f64> = self.initial[..self.a].to_vec();
        for t in 1..cap {
            for i in 0..self.a {
                v[i] += u[i];
            }
            if t + 1 < cap {
                u = self.propagate(&u);
            }
        }
        v
    }

    fn propagate(&self, u: &[f64]) -> Vec<f64> {
        let mut next = vec![0.0; self.a];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            for (j, n) in next.iter_mut().enumerate() {
                *n += ui * self.row(i)[j];
            }
        }
        next
    }

    /// Entropy of the sequence distribution: `H(initial)` plus each row's
    /// entropy weighted by its expected visits.
    pub fn sequence_entropy(&self, cap: usize) -> f64 {
        if cap == 0 {
            return 0.0;
        }
        let v = self.visits(cap);
        entropy_of(&self.initial) + (0..self.a).map(|i| v[i] * entropy_of(self.row(i))).sum::<f64>()
    }

    /// Adds `scale · ∂ sequence_entropy / ∂ logits` to `out`.
    pub fn sequence_entropy_grad(&self, cap: usize, scale: f64, out: &mut [f64]) {
        let h: Vec<f64> = (0..self.a).map(|i| entropy_of(self.row(i))).collect();
        self.visit_weighted_grad(cap, &h, 1.0, scale, out);
    }

    /// Entropy bonus used in training: `H(initial)` plus the expected
    /// per-step row entropy, i.e. row entropies averaged under the
    /// normalized visitation. Bounded by `2 ln(A+1)` whatever the expected
    /// length, so the bonus does not reward long sequences.
    pub fn entropy(&self, cap: usize) -> f64 {
        if cap == 0 {
            return 0.0;
        }
        let v = self.visits(cap);
        let total: f64 = v.iter().sum();
        let h0 = entropy_of(&self.initial);
        if total <= 0.0 {
            return h0;
        }
        h0 + (0..self.a).map(|i| v[i] * entropy_of(self.row(i))).sum::<f64>() / total
    }

    /// Adds `scale · ∂ entropy / ∂ logits` to `out`.
    pub fn entropy_grad(&self, cap: usize, scale: f64, out: &mut [f64]) {
        if cap == 0 {
            return;
        }
        let h: Vec<f64> = (0..self.a).map(|i| entropy_of(self.row(i))).collect();
        let v = self.visits(cap);
        let total: f64 = v.iter().sum();
        if total <= 0.0 {
            self.visit_weighted_grad(cap, &vec![0.0; self.a], 0.0, scale, out);
            return;
        }
        let mean = (0..self.a).map(|i| v[i] * h[i]).sum::<f64>() / total;
        // d(S/V) = (dS − mean·dV)/V with S = Σ vᵢhᵢ and V = Σ vᵢ.
        let c: Vec<f64> = h.iter().map(|&hi| (hi - mean) / total).collect();
        self.visit_weighted_grad(cap, &c, 1.0 / total, scale, out);
    }

    /// Adds `scale ·` the gradient of `H(initial) + Σᵢ vᵢ·c[i] + row_scale·Σᵢ vᵢ·H(row i)`
    /// with `c` held constant and `v = visits(cap)`.
    fn visit_weighted_grad(&self, cap: usize, c: &[f64], row_scale: f64, scale: f64, out: &mut [f64]) {
        let a = self.a;
        let w = a + 1;
        assert_eq!(out.len(), logit_count(a));
        if cap == 0 {
            return;
        }
        let steps = cap - 1;
        // u[t] is the visit vector before drawing row t+1, t = 0..steps.
        let mut u: Vec<Vec<f64>> = Vec::with_capacity(steps);
        if steps > 0 {
            u.push(self.initial[..a].to_vec());
            for t in 1..steps {
                let n = self.propagate(&u[t - 1]);
                u.push(n);
            }
        }
        // g[t] = ∂(Σ vᵢ·c[i])/∂u[t] by reverse accumulation.
        let mut g_next: Vec<f64> = Vec::new();
        let mut d_row = vec![vec![0.0; w]; a];
        let mut weight = vec![0.0; a];
        for t in (0..steps).rev() {
            let mut g = c.to_vec();
            if !g_next.is_empty() {
                for i in 0..a {
                    let row = self.row(i);
                    g[i] += (0..a).map(|j| row[j] * g_next[j]).sum::<f64>();
                    for j in 0..a {
                        d_row[i][j] += u[t][i] * g_next[j];
                    }
                }
            }
            for i in 0..a {
                weight[i] += u[t][i];
            }
            g_next = g;
        }
        let mut d_init: Vec<f64> = self
            .initial
            .iter()
            .map(|&p| if p > 0.0 { -(p.ln() + 1.0) } else { 0.0 })
            .collect();
        if !g_next.is_empty() {
            for j in 0..a {
                d_init[j] += g_next[j];
            }
        }
        let mut tmp = vec![0.0; w];
        softmax_backward(&self.initial, &d_init, &mut tmp);
        for k in 0..w {
            out[k] += scale * tmp[k];
        }
        for i in 0..a {
            let row = self.row(i);
            let dp: Vec<f64> = (0..w)
                .map(|j| {
                    let ent = if row[j] > 0.0 { -(row[j].ln() + 1.0) } else { 0.0 };
                    row_scale * weight[i] * ent + d_row[i][j]
                })
                .collect();
            tmp.iter_mut().for_each(|v| *v = 0.0);
            softmax_backward(row, &dp, &mut tmp);
            for k in 0..w {
                out[w + i * w + k] += scale * tmp[k];
            }
        }
    }

    /// Most likely next token at each position, stopping at `E` or `cap`.
    pub fn greedy(&self, cap: usize) -> Vec<usize> {
        let argmax = |p: &[f64]| {
            p.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (k, &v)| if v > b.1 { (k, v) } else { b })
                .0
        };
        let mut out = Vec::new();
        let mut k = argmax(&self.initial);
        while k != self.end() && out.len() < cap {
            out.push(k);
            k = argmax(self.row(k));
        }
        out
    }
}

/// Actor, critic and observation normalizer with the action space they
/// were trained for.
#[derive(Debug, Serialize, Deserialize)]
pub struct Agent {
    pub actor: Mlp,
    pub critic: Mlp,
    pub obs_norm: RunningNormalizer,
    pub action_space: Vec<PresolverId>,
    pub mode: AgentMode,
    #[serde(skip)]
    forward_calls: AtomicU64,
}

impl Clone for Agent {
    fn clone(&self) -> Self {
        Agent {
            actor: self.actor.clone(),
            critic: self.critic.clone(),
            obs_norm: self.obs_norm.clone(),
            action_space: self.action_space.clone(),
            mode: self.mode,
            forward_calls: AtomicU64::new(self.forward_calls()),
        }
    }
}

impl PartialEq for Agent {
    fn eq(&self, o: &Self) -> bool {
        self.actor == o.actor
            && self.critic == o.critic
            && self.obs_norm == o.obs_norm
            && self.action_space == o.action_space
            && self.mode == o.mode
    }
}

/// Actor and critic initialization gains.
pub const HIDDEN_GAIN: f64 = 1.0;
pub const ACTOR_HEAD_GAIN: f64 = 0.01;
pub const CRITIC_HEAD_GAIN: f64 = 1.0;

impl Agent {
    pub fn new<R: Rng>(
        obs_dim: usize,
        hidden: &[usize],
        action_space: Vec<PresolverId>,
        mode: AgentMode,
        rng: &mut R,
    ) -> Self {
        let a = action_space.len();
        let mut actor_sizes = vec![obs_dim];
        actor_sizes.extend_from_slice(hidden);
        let mut critic_sizes = actor_sizes.clone();
        actor_sizes.push(logit_count(a));
        critic_sizes.push(1);
        Agent {
            actor: Mlp::init(&actor_sizes, HIDDEN_GAIN, ACTOR_HEAD_GAIN, rng).expect("actor sizes"),
            critic: Mlp::init(&critic_sizes, HIDDEN_GAIN, CRITIC_HEAD_GAIN, rng)
                .expect("critic sizes"),
            obs_norm: RunningNormalizer::new(obs_dim),
            action_space,
            mode,
            forward_calls: AtomicU64::new(0),
        }
    }

    pub fn sequence_cap(&self) -> usize {
        self.mode.sequence_cap().min(MAX_SEQUENCE)
    }

    /// Actor passes made since construction or `reset_forward_calls`.
    pub fn forward_calls(&self) -> u64 {
        self.forward_calls.load(Ordering::Relaxed)
    }

    pub fn reset_forward_calls(&self) {
        self.forward_calls.store(0, Ordering::Relaxed);
    }

    pub fn normalize(&self, obs: &[f64]) -> Vec<f64> {
        self.obs_norm.normalize(obs)
    }

    /// One actor pass on an already normalized observation.
    pub fn distribution_normalized(&self, obs: &[f64]) -> Result<ChainDistribution, NnError> {
        self.forward_calls.fetch_add(1, Ordering::Relaxed);
        let logits = self.actor.forward(obs)?;
        Ok(ChainDistribution::from_logits(self.action_space.len(), &logits).expect("actor head size"))
    }

    pub fn distribution(&self, raw_obs: &[f64]) -> Result<ChainDistribution, NnError> {
        self.distribution_normalized(&self.normalize(raw_obs))
    }

    pub fn value_normalized(&self, obs: &[f64]) -> Result<f64, NnError> {
        Ok(self.critic.forward(obs)?[0])
    }

    pub fn to_presolvers(&self, actions: &[usize]) -> Vec<PresolverId> {
        actions.iter().map(|&k| self.action_space[k]).collect()
    }

    /// Probability tables at `raw_obs` for inspection.
    pub fn tables(&self, raw_obs: &[f64]) -> Result<PolicyTables, NnError> {
        let d = self.distribution(raw_obs)?;
        let mut tokens: Vec<String> = self.action_space.iter().map(|p| p.name().to_string()).collect();
        tokens.push("E".into());
        Ok(PolicyTables {
            tokens,
            initial: d.initial().to_vec(),
            transition: (0..d.num_actions()).map(|i| d.row(i).to_vec()).collect(),
        })
    }
}

/// Initial and transition probabilities at one state; `E` is the last token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTables {
    pub tokens: Vec<String>,
    pub initial: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
}

impl PolicyTables {
    pub fn to_csv(&self) -> String {
        let mut s = format!("from,{}\n", self.tokens.join(","));
        let fmt = |r: &[f64]| r.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(",");
        s += &format!("start,{}\n", fmt(&self.initial));
        for (t, row) in self.tokens.iter().zip(&self.transition) {
            s += &format!("{t},{}\n", fmt(row));
        }
        s
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint version {0} is not supported")]
    Version(u32),
    #[error("invalid checkpoint: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Everything needed to resume acting. Optimizer state is not kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub iteration: usize,
    pub agent: Agent,
    /// Running statistics of returns used to scale critic targets.
    pub return_norm: RunningNormalizer,
}

impl Checkpoint {
    pub fn new(agent: Agent, iteration: usize, return_norm: RunningNormalizer) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            iteration,
            agent,
            return_norm,
        }
    }

    pub fn validate(&self) -> Result<(), CheckpointError> {
        if self.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version(self.version));
        }
        let bad = |e: String| CheckpointError::Invalid(e);
        let ag = &self.agent;
        ag.actor.validate().map_err(|e| bad(format!("actor: {e}")))?;
        ag.critic.validate().map_err(|e| bad(format!("critic: {e}")))?;
        ag.obs_norm.validate().map_err(bad)?;
        self.return_norm.validate().map_err(bad)?;
        if ag.action_space.is_empty() {
            return Err(bad("empty action space".into()));
        }
        if ag.actor.output_dim() != logit_count(ag.action_space.len()) {
            return Err(bad("actor head does not match action space".into()));
        }
        if ag.critic.output_dim() != 1 {
            return Err(bad("critic must have one output".into()));
        }
        let d = ag.actor.input_dim();
        if ag.critic.input_dim() != d || ag.obs_norm.dim() != d {
            return Err(bad("observation dimensions disagree".into()));
        }
        if self.return_norm.dim() != 1 {
            return Err(bad("return normalizer must be scalar".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CheckpointError> {
        let c: Checkpoint = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
