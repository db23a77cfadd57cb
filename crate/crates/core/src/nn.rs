//! Minimal feed-forward network, Adam and a running normalizer.
//!
//! Parameters live in one flat vector so the optimizer and checkpoints treat
//! them uniformly. Layer `l` occupies `W_l` (row-major, `out × in`) followed
//! by `b_l`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("input has length {got}, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("cache was produced by a network of a different shape")]
    CacheMismatch,
    #[error("non-finite parameter at {0}")]
    NonFinite(usize),
    #[error("invalid layer sizes {0:?}")]
    Layers(Vec<usize>),
}

/// Tanh hidden layers and a linear output head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Layer inputs recorded by `forward_cached`; `acts[l]` feeds layer `l`.
#[derive(Debug, Clone)]
pub struct Cache {
    acts: Vec<Vec<f64>>,
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
}

impl Mlp {
    /// Zero-initialized network with layer widths `sizes` (input first).
    pub fn zeros(sizes: &[usize]) -> Result<Self, NnError> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(NnError::Layers(sizes.to_vec()));
        }
        Ok(Mlp {
            sizes: sizes.to_vec(),
            params: vec![0.0; param_count(sizes)],
        })
    }

    /// Scaled uniform weights with variance `gain² / fan_in` and zero biases.
    /// `hidden_gain` applies to every layer but the last, `head_gain` to it.
    pub fn init<R: Rng>(
        sizes: &[usize],
        hidden_gain: f64,
        head_gain: f64,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        let mut net = Self::zeros(sizes)?;
        let layers = net.num_layers();
        for l in 0..layers {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let gain = if l + 1 == layers { head_gain } else { hidden_gain };
            let a = gain * (3.0 / fan_in as f64).sqrt();
            let off = net.offset(l);
            for w in &mut net.params[off..off + fan_in * fan_out] {
                *w = if a > 0.0 { rng.gen_range(-a..a) } else { 0.0 };
            }
        }
        Ok(net)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    fn offset(&self, layer: usize) -> usize {
        param_count(&self.sizes[..=layer])
    }

    /// `(weights, biases)` of layer `l`.
    pub fn layer(&self, l: usize) -> (&[f64], &[f64]) {
        let off = self.offset(l);
        let n = self.sizes[l] * self.sizes[l + 1];
        let (w, rest) = self.params[off..].split_at(n);
        (w, &rest[..self.sizes[l + 1]])
    }

    pub fn layer_mut(&mut self, l: usize) -> (&mut [f64], &mut [f64]) {
        let off = self.offset(l);
        let n = self.sizes[l] * self.sizes[l + 1];
        let out = self.sizes[l + 1];
        let (w, rest) = self.params[off..].split_at_mut(n);
        (w, &mut rest[..out])
    }

    /// Rejects non-finite parameters.
    pub fn validate(&self) -> Result<(), NnError> {
        let expected = param_count(&self.sizes);
        if self.sizes.len() < 2 || self.sizes.contains(&0) {
            return Err(NnError::Layers(self.sizes.clone()));
        }
        if self.params.len() != expected {
            return Err(NnError::Shape {
                expected,
                got: self.params.len(),
            });
        }
        match self.params.iter().position(|v| !v.is_finite()) {
            Some(k) => Err(NnError::NonFinite(k)),
            None => Ok(()),
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        self.forward_cached(x).map(|(y, _)| y)
    }

    pub fn forward_cached(&self, x: &[f64]) -> Result<(Vec<f64>, Cache), NnError> {
        if x.len() != self.input_dim() {
            return Err(NnError::Shape {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        let layers = self.num_layers();
        let mut acts = Vec::with_capacity(layers);
        let mut h = x.to_vec();
        for l in 0..layers {
            let (w, b) = self.layer(l);
            let n_in = self.sizes[l];
            let mut z: Vec<f64> = b.to_vec();
            for (o, zo) in z.iter_mut().enumerate() {
                let row = &w[o * n_in..(o + 1) * n_in];
                *zo += row.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
            }
            if l + 1 < layers {
                for v in z.iter_mut() {
                    *v = v.tanh();
                }
            }
            acts.push(std::mem::replace(&mut h, z));
        }
        Ok((h, Cache { acts }))
    }

    /// Adds `∂(g·y)/∂θ` to `grads` and returns `∂(g·y)/∂x`, where `y` is the
    /// output recorded in `cache`.
    pub fn backward(
        &self,
        cache: &Cache,
        grad_out: &[f64],
        grads: &mut [f64],
    ) -> Result<Vec<f64>, NnError> {
        let layers = self.num_layers();
        if cache.acts.len() != layers
            || cache.acts.iter().zip(&self.sizes).any(|(a, &n)| a.len() != n)
        {
            return Err(NnError::CacheMismatch);
        }
        if grad_out.len() != self.output_dim() {
            return Err(NnError::Shape {
                expected: self.output_dim(),
                got: grad_out.len(),
            });
        }
        if grads.len() != self.params.len() {
            return Err(NnError::Shape {
                expected: self.params.len(),
                got: grads.len(),
            });
        }
        let mut delta = grad_out.to_vec();
        for l in (0..layers).rev() {
            let n_in = self.sizes[l];
            let input = &cache.acts[l];
            let off = self.offset(l);
            let (w, _) = self.layer(l);
            let (gw, gb) = grads[off..].split_at_mut(n_in * delta.len());
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                gb[o] += d;
                for (g, &a) in gw[o * n_in..(o + 1) * n_in].iter_mut().zip(input) {
                    *g += d * a;
                }
            }
            let mut prev = vec![0.0; n_in];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                for (p, &wv) in prev.iter_mut().zip(&w[o * n_in..(o + 1) * n_in]) {
                    *p += d * wv;
                }
            }
            // `input` is tanh output for every layer but the first.
            if l > 0 {
                for (p, &a) in prev.iter_mut().zip(input) {
                    *p *= 1.0 - a * a;
                }
            }
            delta = prev;
        }
        Ok(delta)
    }
}

/// Adam minimizing a loss; `lr` may be changed between steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(num_params: usize, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for k in 0..params.len() {
            let g = grads[k];
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g;
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g;
            let mh = self.m[k] / c1;
            let vh = self.v[k] / c2;
            params[k] -= self.lr * mh / (vh.sqrt() + self.eps);
        }
    }
}

/// `base · 0.5^⌊iteration / half_every⌋`.
pub fn halved_lr(base: f64, iteration: usize, half_every: usize) -> f64 {
    if half_every == 0 {
        return base;
    }
    base * 0.5f64.powi((iteration / half_every) as i32)
}

/// Per-dimension running mean and population variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningNormalizer {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

pub const NORM_EPS: f64 = 1e-8;

impl RunningNormalizer {
    pub fn new(dim: usize) -> Self {
        RunningNormalizer {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self) -> Vec<f64> {
        if self.count == 0 {
            return vec![0.0; self.dim()];
        }
        self.m2.iter().map(|m| m / self.count as f64).collect()
    }

    pub fn std(&self) -> Vec<f64> {
        self.variance().into_iter().map(f64::sqrt).collect()
    }

    pub fn update(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.dim());
        self.count += 1;
        let n = self.count as f64;
        for k in 0..x.len() {
            let d = x[k] - self.mean[k];
            self.mean[k] += d / n;
            self.m2[k] += d * (x[k] - self.mean[k]);
        }
    }

    /// Merges a batch in one step.
    pub fn update_batch(&mut self, xs: &[Vec<f64>]) {
        if xs.is_empty() {
            return;
        }
        let mut b = RunningNormalizer::new(self.dim());
        for x in xs {
            b.update(x);
        }
        self.merge(&b);
    }

    pub fn merge(&mut self, other: &RunningNormalizer) {
        assert_eq!(other.dim(), self.dim());
        if other.count == 0 {
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for k in 0..self.dim() {
            let d = other.mean[k] - self.mean[k];
            self.mean[k] += d * nb / n;
            self.m2[k] += other.m2[k] + d * d * na * nb / n;
        }
        self.count += other.count;
    }

    /// `(x − mean)/sqrt(var + 1e-8)`; identity before any update.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        if self.count == 0 {
            return x.to_vec();
        }
        let var = self.variance();
        x.iter()
            .zip(&self.mean)
            .zip(&var)
            .map(|((x, m), v)| (x - m) / (v + NORM_EPS).sqrt())
            .collect()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.m2.len() != self.mean.len() {
            return Err("normalizer moment lengths differ".into());
        }
        if self.mean.iter().chain(&self.m2).any(|v| !v.is_finite()) {
            return Err("normalizer has non-finite moments".into());
        }
        if self.m2.iter().any(|&v| v < 0.0) {
            return Err("normalizer has negative variance".into());
        }
        Ok(())
    }
}
