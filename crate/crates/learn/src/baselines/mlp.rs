use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BaselineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Decoupled weight decay, applied to every parameter after each step.
    pub weight_decay: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig { hidden: vec![64, 64], epochs: 100, batch_size: 32, learning_rate: 1e-3, weight_decay: 0.1, seed: 0 }
    }
}

/// Fully connected net with tanh hidden units and a linear scalar output.
/// Parameters are flat: for each layer, the row-major weight matrix then
/// the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn new(inputs: usize, hidden: &[usize], rng: &mut impl Rng) -> Mlp {
        let mut sizes = vec![inputs];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            params.extend((0..fan_in * fan_out).map(|_| rng.random_range(-limit..limit)));
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Mlp { sizes, params }
    }

    pub fn param_count(sizes: &[usize]) -> usize {
        sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Activations of every layer, input first.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let mut offset = 0;
        let layers = self.sizes.len() - 1;
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &self.params[offset..offset + n_in * n_out];
            let bias = &self.params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            let prev = &acts[l];
            let out: Vec<f64> = (0..n_out)
                .map(|o| {
                    let z =
                        bias[o] + weights[o * n_in..(o + 1) * n_in].iter().zip(prev).map(|(a, b)| a * b).sum::<f64>();
                    if l + 1 < layers {
                        z.tanh()
                    } else {
                        z
                    }
                })
                .collect();
            acts.push(out);
            offset += n_in * n_out + n_out;
        }
        acts
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.activations(x).last().expect("output layer")[0]
    }

    /// Mean squared error over the batch and its gradient.
    pub fn loss_and_grad(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        let n = xs.len() as f64;
        let layers = self.sizes.len() - 1;
        let offsets: Vec<usize> = self
            .sizes
            .windows(2)
            .scan(0, |o, w| {
                let here = *o;
                *o += w[0] * w[1] + w[1];
                Some(here)
            })
            .collect();
        for (x, &y) in xs.iter().zip(ys) {
            let acts = self.activations(x);
            let err = acts[layers][0] - y;
            loss += err * err / n;
            let mut delta = vec![2.0 * err / n];
            for l in (0..layers).rev() {
                let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
                let off = offsets[l];
                let prev = &acts[l];
                for o in 0..n_out {
                    for i in 0..n_in {
                        grad[off + o * n_in + i] += delta[o] * prev[i];
                    }
                    grad[off + n_in * n_out + o] += delta[o];
                }
                if l > 0 {
                    let weights = &self.params[off..off + n_in * n_out];
                    delta = (0..n_in)
                        .map(|i| {
                            let back: f64 = (0..n_out).map(|o| weights[o * n_in + i] * delta[o]).sum();
                            back * (1.0 - prev[i] * prev[i])
                        })
                        .collect();
                }
            }
        }
        (loss, grad)
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = Self::B1 * self.m[i] + (1.0 - Self::B1) * grad[i];
            self.v[i] = Self::B2 * self.v[i] + (1.0 - Self::B2) * grad[i] * grad[i];
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + Self::EPS);
        }
    }
}

/// Trained net on standardized inputs; targets are z-scored internally.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub config: MlpConfig,
    pub net: Mlp,
    pub y_mean: f64,
    pub y_scale: f64,
    /// Mean training loss per epoch, on the scaled targets.
    pub epoch_losses: Vec<f64>,
}

impl MlpModel {
    pub fn predict_row(&self, z: &[f64]) -> f64 {
        self.y_mean + self.y_scale * self.net.predict(z)
    }
}

pub fn fit_mlp(rows: &[Vec<f64>], y: &[f64], config: &MlpConfig) -> Result<MlpModel, BaselineError> {
    if rows.is_empty() || rows.len() != y.len() {
        return Err(BaselineError::TooFewRows { rows: rows.len(), needed: 1 });
    }
    let n = y.len() as f64;
    let y_mean = y.iter().sum::<f64>() / n;
    let sd = (y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n).sqrt();
    let y_scale = if sd > 0.0 { sd } else { 1.0 };
    let targets: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_scale).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut net = Mlp::new(rows[0].len(), &config.hidden, &mut rng);
    let mut adam = Adam { m: vec![0.0; net.params.len()], v: vec![0.0; net.params.len()], t: 0 };
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let batch = config.batch_size.max(1);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(batch) {
            let xs: Vec<&[f64]> = chunk.iter().map(|&i| rows[i].as_slice()).collect();
            let ys: Vec<f64> = chunk.iter().map(|&i| targets[i]).collect();
            let (loss, grad) = net.loss_and_grad(&xs, &ys);
            if !loss.is_finite() {
                return Err(BaselineError::Diverged {
                    epoch,
                    config: serde_json::to_string(config).unwrap_or_default(),
                });
            }
            total += loss * chunk.len() as f64;
            adam.step(&mut net.params, &grad, config.learning_rate);
            if config.weight_decay > 0.0 {
                let shrink = 1.0 - config.learning_rate * config.weight_decay;
                net.params.iter_mut().for_each(|p| *p *= shrink);
            }
        }
        epoch_losses.push(total / n);
    }
    Ok(MlpModel { config: config.clone(), net, y_mean, y_scale, epoch_losses })
}
