//! PPO over adaptive action sequences.
//!
//! Each iteration collects at least `samples_per_iter` step records from
//! whole episodes with a frozen actor, computes finite-horizon advantages
//! `Â = R̃(s) − V(s)` once, then runs `epochs` passes of minibatch updates on
//! the clipped objective plus an entropy bonus and on `½(V − R̃)²`.
//! `R̃` is the return-to-go divided by the running standard deviation of
//! returns.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{EpisodeSummary, Environment};
use crate::nn::{halved_lr, Adam, RunningNormalizer};
use crate::policy::{logit_count, Agent, ChainDistribution, Checkpoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    pub lr_actor: f64,
    pub lr_critic: f64,
    pub gamma: f64,
    /// Passes over each buffer.
    pub epochs: usize,
    /// Minimum step records per iteration; episodes are never split.
    pub samples_per_iter: usize,
    pub minibatch: usize,
    pub entropy_coef: f64,
    pub clip: f64,
    pub workers: usize,
    pub iterations: usize,
    pub lr_half_every: usize,
    pub validate_every: usize,
    pub hidden: Vec<usize>,
    pub seed: u64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            lr_actor: 1e-4,
            lr_critic: 1e-4,
            gamma: 1.0,
            epochs: 12,
            samples_per_iter: 16,
            minibatch: 16,
            entropy_coef: 1e-2,
            clip: 0.2,
            workers: 4,
            iterations: 1000,
            lr_half_every: 1000,
            validate_every: 10,
            hidden: vec![64, 64],
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid trainer config: {0}")]
    Config(String),
    #[error("non-finite {what} at iteration {iteration}")]
    NonFinite { what: &'static str, iteration: usize },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Nn(#[from] crate::nn::NnError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.lr_actor) || !pos(self.lr_critic) {
            return bad("learning rates must be positive");
        }
        if !(self.gamma.is_finite() && (0.0..=1.0).contains(&self.gamma)) {
            return bad("gamma must be in [0, 1]");
        }
        if self.epochs == 0 || self.samples_per_iter == 0 || self.minibatch == 0 || self.workers == 0 {
            return bad("epochs, samples_per_iter, minibatch and workers must be positive");
        }
        if !(self.entropy_coef.is_finite() && self.entropy_coef >= 0.0) {
            return bad("entropy_coef must be ≥ 0");
        }
        if !(self.clip > 0.0 && self.clip < 1.0) {
            return bad("clip must be in (0, 1)");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden layers must be non-empty and positive");
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, TrainError> {
        let c: TrainerConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies `key=value` overrides, with `value` in TOML syntax.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self, TrainError> {
        let mut table: toml::Table = toml::from_str(&self.to_toml())?;
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| TrainError::Config(format!("override {o:?} is not key=value")))?;
            let parsed: toml::Table = toml::from_str(&format!("{} = {}", k.trim(), v.trim()))?;
            table.extend(parsed);
        }
        Self::from_toml(&toml::to_string(&table).expect("table serializes"))
    }

    pub fn actor_lr(&self, iteration: usize) -> f64 {
        halved_lr(self.lr_actor, iteration, self.lr_half_every)
    }

    pub fn critic_lr(&self, iteration: usize) -> f64 {
        halved_lr(self.lr_critic, iteration, self.lr_half_every)
    }
}

/// One environment step as seen by the learner.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub raw_obs: Vec<f64>,
    /// Observation normalized with the statistics in force at collection.
    pub obs: Vec<f64>,
    pub actions: Vec<usize>,
    pub cap: usize,
    pub log_prob: f64,
    pub reward: f64,
    /// Discounted return-to-go from this step.
    pub ret: f64,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub records: Vec<StepRecord>,
    pub summary: EpisodeSummary,
    /// Actor passes made during the episode.
    pub forward_calls: u64,
}

impl EpisodeResult {
    pub fn episode_return(&self) -> f64 {
        self.records.iter().map(|r| r.reward).sum()
    }
}

/// `R_t = r_t + γ R_{t+1}`.
pub fn returns_to_go(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        acc = rewards[t] + gamma * acc;
        out[t] = acc;
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub enum Start {
    Random,
    Instance(usize),
}

/// Plays one episode, sampling a whole sequence per step from one actor pass.
pub fn run_episode<E: Environment + ?Sized>(
    env: &mut E,
    agent: &Agent,
    start: Start,
    gamma: f64,
    rng: &mut ChaCha8Rng,
) -> EpisodeResult {
    let calls0 = agent.forward_calls();
    let mut obs = match start {
        Start::Random => env.reset(rng),
        Start::Instance(k) => env.reset_instance(k),
    };
    let cap = agent.sequence_cap();
    let mut records = Vec::new();
    loop {
        let norm = agent.normalize(&obs);
        let dist = agent
            .distribution_normalized(&norm)
            .expect("observation matches actor input");
        let seq = dist.sample(cap, rng);
        let out = env.step(&agent.to_presolvers(&seq.actions));
        records.push(StepRecord {
            raw_obs: std::mem::take(&mut obs),
            obs: norm,
            actions: seq.actions,
            cap,
            log_prob: seq.log_prob,
            reward: out.reward,
            ret: 0.0,
            done: out.done,
        });
        match out.obs {
            Some(o) if !out.done => obs = o,
            _ => break,
        }
    }
    let rewards: Vec<f64> = records.iter().map(|r| r.reward).collect();
    for (r, g) in records.iter_mut().zip(returns_to_go(&rewards, gamma)) {
        r.ret = g;
    }
    EpisodeResult {
        records,
        summary: env.summary().clone(),
        forward_calls: agent.forward_calls() - calls0,
    }
}

/// RNG for stream `(a, b)` under `seed`.
pub fn stream_rng(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream((a << 20) ^ b);
    r
}

/// Per-worker record quotas summing to `total`.
pub fn quotas(total: usize, workers: usize) -> Vec<usize> {
    (0..workers)
        .map(|w| total / workers + usize::from(w < total % workers))
        .collect()
}

/// Collects whole episodes on every worker until its quota is met. Output
/// is merged in worker order and is independent of thread scheduling.
pub fn collect<E: Environment>(
    agent: &Agent,
    envs: &mut [E],
    samples: usize,
    gamma: f64,
    seed: u64,
    iteration: usize,
) -> Vec<EpisodeResult> {
    let q = quotas(samples, envs.len());
    let per_worker: Vec<Vec<EpisodeResult>> = std::thread::scope(|s| {
        let handles: Vec<_> = envs
            .iter_mut()
            .zip(q)
            .enumerate()
            .map(|(w, (env, quota))| {
                // Each worker owns a snapshot so its forward-call count is its own.
                let snapshot = agent.clone();
                s.spawn(move || {
                    let agent = &snapshot;
                    let mut rng = stream_rng(seed, iteration as u64, w as u64);
                    let mut eps = Vec::new();
                    let mut n = 0;
                    while n < quota {
                        let ep = run_episode(env, agent, Start::Random, gamma, &mut rng);
                        n += ep.records.len();
                        eps.push(ep);
                    }
                    eps
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    per_worker.into_iter().flatten().collect()
}

/// Clipped surrogate `r_ε^clip · Â` and whether the sample is in a clamped
/// case, where its gradient with respect to `r` is zero.
pub fn ppo_objective(new_log_prob: f64, old_log_prob: f64, adv: f64, eps: f64) -> (f64, bool) {
    let r = (new_log_prob - old_log_prob).exp();
    if adv > 0.0 && r >= 1.0 + eps {
        ((1.0 + eps) * adv, true)
    } else if adv < 0.0 && r <= 1.0 - eps {
        ((1.0 - eps) * adv, true)
    } else {
        (r * adv, false)
    }
}

/// Mean statistics of one `update` call.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateMetrics {
    pub mean_ratio: f64,
    /// Ratio before any parameter change, averaged over the buffer.
    pub initial_ratio: f64,
    pub clip_fraction: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
}

/// Adds `weight ·` the gradient of `−(surrogate + entropy_coef · entropy)`
/// for one sample to `grads` and returns `(surrogate, entropy, ratio, clamped)`.
pub fn actor_sample_grad(
    agent: &Agent,
    rec: &StepRecord,
    adv: f64,
    cfg: &TrainerConfig,
    weight: f64,
    grads: &mut [f64],
) -> Result<(f64, f64, f64, bool), crate::nn::NnError> {
    let (logits, cache) = agent.actor.forward_cached(&rec.obs)?;
    let a = agent.action_space.len();
    let dist = ChainDistribution::from_logits(a, &logits).expect("actor head size");
    let new_lp = dist.log_prob(&rec.actions, rec.cap);
    let (surr, clamped) = ppo_objective(new_lp, rec.log_prob, adv, cfg.clip);
    let ratio = (new_lp - rec.log_prob).exp();
    let entropy = dist.entropy(rec.cap);
    // Loss = −(surrogate + c·entropy), averaged over the minibatch.
    let mut g = vec![0.0; logit_count(a)];
    if !clamped {
        dist.log_prob_grad(&rec.actions, rec.cap, -weight * ratio * adv, &mut g);
    }
    if cfg.entropy_coef > 0.0 {
        dist.entropy_grad(rec.cap, -weight * cfg.entropy_coef, &mut g);
    }
    agent.actor.backward(&cache, &g, grads)?;
    Ok((surr, entropy, ratio, clamped))
}

pub struct Trainer<E: Environment + Clone> {
    pub cfg: TrainerConfig,
    pub agent: Agent,
    pub return_norm: RunningNormalizer,
    actor_opt: Adam,
    critic_opt: Adam,
    envs: Vec<E>,
    iteration: usize,
}

/// One row of the metrics log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub episodes: usize,
    pub records: usize,
    pub mean_return: f64,
    pub update: UpdateMetrics,
    pub validation_cost: Option<f64>,
}

pub const METRICS_HEADER: &str =
    "iteration,mean_return,clip_fraction,policy_loss,value_loss,entropy,mean_ratio,validation_cost";

pub fn metrics_csv(log: &[IterationLog]) -> String {
    let mut s = String::from(METRICS_HEADER);
    s.push('\n');
    for r in log {
        let v = r.validation_cost.map(|v| v.to_string()).unwrap_or_default();
        let u = &r.update;
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.iteration, r.mean_return, u.clip_fraction, u.policy_loss, u.value_loss, u.entropy, u.mean_ratio, v
        )
        .unwrap();
    }
    s
}

pub struct TrainOutcome {
    /// Lowest validation cost seen, earliest on ties; the final agent when
    /// no validation ran.
    pub best: Checkpoint,
    pub best_validation: Option<f64>,
    pub last: Checkpoint,
    pub log: Vec<IterationLog>,
}

impl<E: Environment + Clone> Trainer<E> {
    pub fn new(cfg: TrainerConfig, env: E) -> Result<Self, TrainError> {
        cfg.validate()?;
        let mut rng = stream_rng(cfg.seed, u64::MAX >> 21, 0);
        let agent = Agent::new(
            env.obs_dim(),
            &cfg.hidden,
            env.action_space().to_vec(),
            env.mode(),
            &mut rng,
        );
        Ok(Self::with_agent(cfg, env, agent, RunningNormalizer::new(1)))
    }

    pub fn with_agent(cfg: TrainerConfig, env: E, agent: Agent, return_norm: RunningNormalizer) -> Self {
        let envs = vec![env; cfg.workers];
        Trainer {
            actor_opt: Adam::new(agent.actor.num_params(), cfg.lr_actor),
            critic_opt: Adam::new(agent.critic.num_params(), cfg.lr_critic),
            cfg,
            agent,
            return_norm,
            envs,
            iteration: 0,
        }
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::new(self.agent.clone(), self.iteration, self.return_norm.clone())
    }

    fn return_scale(&self) -> f64 {
        let s = self.return_norm.std()[0];
        if s < 1e-8 {
            1.0
        } else {
            s
        }
    }

    /// Mean `½(V − R̃)²` over `records` under the current critic.
    pub fn value_loss(&self, records: &[StepRecord]) -> Result<f64, TrainError> {
        let scale = self.return_scale();
        let mut total = 0.0;
        for r in records {
            let e = self.agent.value_normalized(&r.obs)? - r.ret / scale;
            total += 0.5 * e * e;
        }
        Ok(total / records.len().max(1) as f64)
    }

    /// PPO update on a fixed buffer. Learning rates follow the halving
    /// schedule at the current iteration.
    pub fn update(&mut self, records: &[StepRecord]) -> Result<UpdateMetrics, TrainError> {
        assert!(!records.is_empty(), "update on an empty buffer");
        let it = self.iteration;
        let cfg = self.cfg.clone();
        self.actor_opt.lr = cfg.actor_lr(it);
        self.critic_opt.lr = cfg.critic_lr(it);
        let scale = self.return_scale();
        let targets: Vec<f64> = records.iter().map(|r| r.ret / scale).collect();
        let mut advs = Vec::with_capacity(records.len());
        for (r, t) in records.iter().zip(&targets) {
            advs.push(t - self.agent.value_normalized(&r.obs)?);
        }
        let mut initial_ratio = 0.0;
        for r in records {
            let d = ChainDistribution::from_logits(
                self.agent.action_space.len(),
                &self.agent.actor.forward(&r.obs)?,
            )
            .expect("actor head size");
            initial_ratio += (d.log_prob(&r.actions, r.cap) - r.log_prob).exp();
        }
        let mut rng = stream_rng(cfg.seed, it as u64, u64::MAX >> 44);
        let mut order: Vec<usize> = (0..records.len()).collect();
        let mut m = UpdateMetrics {
            initial_ratio: initial_ratio / records.len() as f64,
            ..UpdateMetrics::default()
        };
        let mut samples = 0usize;
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(cfg.minibatch) {
                let mut a: Vec<f64> = batch.iter().map(|&k| advs[k]).collect();
                if a.len() > 1 {
                    let mean = a.iter().sum::<f64>() / a.len() as f64;
                    let var = a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / a.len() as f64;
                    let sd = var.sqrt() + 1e-8;
                    a.iter_mut().for_each(|v| *v = (*v - mean) / sd);
                }
                let w = 1.0 / batch.len() as f64;
                let mut ga = vec![0.0; self.agent.actor.num_params()];
                let mut gc = vec![0.0; self.agent.critic.num_params()];
                for (&k, &adv) in batch.iter().zip(&a) {
                    let rec = &records[k];
                    let (surr, ent, ratio, clamped) =
                        actor_sample_grad(&self.agent, rec, adv, &cfg, w, &mut ga)?;
                    let (v, cache) = self.agent.critic.forward_cached(&rec.obs)?;
                    let err = v[0] - targets[k];
                    self.agent.critic.backward(&cache, &[w * err], &mut gc)?;
                    m.policy_loss -= surr + cfg.entropy_coef * ent;
                    m.value_loss += 0.5 * err * err;
                    m.entropy += ent;
                    m.mean_ratio += ratio;
                    m.clip_fraction += f64::from(u8::from(clamped));
                    samples += 1;
                }
                if ga.iter().chain(&gc).any(|g| !g.is_finite()) {
                    return Err(TrainError::NonFinite {
                        what: "gradient",
                        iteration: it,
                    });
                }
                self.actor_opt.step(self.agent.actor.params_mut(), &ga);
                self.critic_opt.step(self.agent.critic.params_mut(), &gc);
            }
        }
        let n = samples as f64;
        m.policy_loss /= n;
        m.value_loss /= n;
        m.entropy /= n;
        m.mean_ratio /= n;
        m.clip_fraction /= n;
        if !(m.policy_loss.is_finite() && m.value_loss.is_finite()) {
            return Err(TrainError::NonFinite {
                what: "loss",
                iteration: it,
            });
        }
        Ok(m)
    }

    /// Collects one buffer, updates, and advances the iteration counter.
    pub fn step(&mut self) -> Result<IterationLog, TrainError> {
        let it = self.iteration;
        let episodes = collect(
            &self.agent,
            &mut self.envs,
            self.cfg.samples_per_iter,
            self.cfg.gamma,
            self.cfg.seed,
            it,
        );
        let records: Vec<StepRecord> = episodes.iter().flat_map(|e| e.records.clone()).collect();
        for r in &records {
            self.return_norm.update(&[r.ret]);
        }
        let update = self.update(&records)?;
        let raw: Vec<Vec<f64>> = records.iter().map(|r| r.raw_obs.clone()).collect();
        self.agent.obs_norm.update_batch(&raw);
        self.iteration += 1;
        Ok(IterationLog {
            iteration: it,
            episodes: episodes.len(),
            records: records.len(),
            mean_return: episodes.iter().map(|e| e.episode_return()).sum::<f64>() / episodes.len() as f64,
            update,
            validation_cost: None,
        })
    }

    /// Runs `cfg.iterations` iterations. When `validation` is given, the
    /// agent is scored before iterations `0, k, 2k, …` and after the last.
    pub fn train(
        &mut self,
        mut validation: Option<&mut dyn FnMut(&Agent) -> f64>,
    ) -> Result<TrainOutcome, TrainError> {
        let mut log = Vec::new();
        let mut best: Option<(f64, Checkpoint)> = None;
        let consider = |score: f64, ck: Checkpoint, best: &mut Option<(f64, Checkpoint)>| {
            if best.as_ref().map_or(true, |(b, _)| score < *b) {
                *best = Some((score, ck));
            }
        };
        let every = self.cfg.validate_every.max(1);
        let total = self.cfg.iterations;
        for k in 0..total {
            let score = match validation.as_mut() {
                Some(f) if k % every == 0 => {
                    let s = f(&self.agent);
                    consider(s, self.checkpoint(), &mut best);
                    Some(s)
                }
                _ => None,
            };
            let mut row = self.step()?;
            row.validation_cost = score;
            log.push(row);
        }
        let last = self.checkpoint();
        if let Some(f) = validation.as_mut() {
            let s = f(&self.agent);
            consider(s, last.clone(), &mut best);
        }
        let (best_validation, best) = match best {
            Some((s, c)) => (Some(s), c),
            None => (None, last.clone()),
        };
        Ok(TrainOutcome {
            best,
            best_validation,
            last,
            log,
        })
    }
}

/// Mean total cost of one sampled episode per instance of `env`, with a
/// fixed RNG stream per instance.
pub fn mean_episode_cost<E: Environment + ?Sized>(env: &mut E, agent: &Agent, seed: u64) -> f64 {
    let n = env.instance_count();
    let mut total = 0.0;
    for k in 0..n {
        let mut rng = stream_rng(seed, u64::MAX >> 30, k as u64);
        let ep = run_episode(env, agent, Start::Instance(k), 1.0, &mut rng);
        total += ep.summary.total_cost();
    }
    total / n as f64
}

pub fn write_metrics(path: &Path, log: &[IterationLog]) -> std::io::Result<()> {
    std::fs::write(path, metrics_csv(log))
}
