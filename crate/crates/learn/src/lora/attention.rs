//! A single-head attention block with adapters on its query and value
//! projections, trained against a teacher with a planted low-rank update.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{LoraAdapter, LoraError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToyConfig {
    pub d_model: usize,
    pub seq_len: usize,
    pub samples: usize,
    /// Token embeddings span a subspace of this dimension.
    pub input_rank: usize,
    pub rank: usize,
    pub alpha: f64,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub steps: usize,
    /// Rank of the planted update on each adapted projection.
    pub target_rank: usize,
    /// Magnitude of the planted update.
    pub target_scale: f64,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            d_model: 64,
            seq_len: 8,
            samples: 32,
            input_rank: 8,
            rank: 16,
            alpha: 16.0,
            learning_rate: 1e-4,
            weight_decay: 0.01,
            steps: 200,
            target_rank: 2,
            target_scale: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    /// Loss before the first step, then after every step.
    pub losses: Vec<f64>,
    pub frozen_sha256_before: String,
    pub frozen_sha256_after: String,
    pub trainable_params: usize,
    pub frozen_params: usize,
}

impl TrainingTrace {
    pub fn initial(&self) -> f64 {
        self.losses[0]
    }

    pub fn last(&self) -> f64 {
        *self.losses.last().expect("at least the initial loss")
    }
}

/// Frozen projections plus adapters on query and value.
#[derive(Debug, Clone)]
pub struct AttentionBlock {
    pub query: LoraAdapter,
    pub key: DMatrix<f64>,
    pub value: LoraAdapter,
    pub out: DMatrix<f64>,
}

fn uniform(rows: usize, cols: usize, bound: f64, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-bound..bound))
}

/// `X·Wᵀ` through an adapter, without forming `B·A`.
fn project(x: &DMatrix<f64>, ad: &LoraAdapter) -> DMatrix<f64> {
    x * ad.w0().transpose() + (x * ad.a.transpose()) * ad.b.transpose() * ad.scale()
}

fn softmax_rows(s: &DMatrix<f64>) -> DMatrix<f64> {
    let mut p = s.clone();
    for mut row in p.row_iter_mut() {
        let m = row.max();
        row.apply(|v| *v = (*v - m).exp());
        let z = row.sum();
        row /= z;
    }
    p
}

struct Cache {
    k: DMatrix<f64>,
    v: DMatrix<f64>,
    p: DMatrix<f64>,
    y: DMatrix<f64>,
}

/// Gradients for the four adapter matrices.
#[derive(Debug, Clone)]
pub struct AdapterGrads {
    pub query_a: DMatrix<f64>,
    pub query_b: DMatrix<f64>,
    pub value_a: DMatrix<f64>,
    pub value_b: DMatrix<f64>,
}

impl AttentionBlock {
    fn run(&self, x: &DMatrix<f64>) -> Cache {
        let scale = 1.0 / (self.key.nrows() as f64).sqrt();
        let q = project(x, &self.query);
        let k = x * self.key.transpose();
        let v = project(x, &self.value);
        let p = softmax_rows(&((&q * k.transpose()) * scale));
        let y = (&p * &v) * self.out.transpose();
        Cache { k, v, p, y }
    }

    pub fn forward(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.run(x).y
    }

    /// Mean squared error over every output element of every sequence.
    pub fn loss(&self, xs: &[DMatrix<f64>], targets: &[DMatrix<f64>]) -> f64 {
        let count: usize = targets.iter().map(|t| t.len()).sum();
        xs.iter().zip(targets).map(|(x, t)| (self.forward(x) - t).norm_squared()).sum::<f64>() / count as f64
    }

    pub fn loss_and_grads(&self, xs: &[DMatrix<f64>], targets: &[DMatrix<f64>]) -> (f64, AdapterGrads) {
        let m = self.key.nrows();
        let scale = 1.0 / (m as f64).sqrt();
        let count: usize = targets.iter().map(|t| t.len()).sum();
        let mut dwq = DMatrix::zeros(m, self.query.w0().ncols());
        let mut dwv = DMatrix::zeros(m, self.value.w0().ncols());
        let mut loss = 0.0;
        for (x, t) in xs.iter().zip(targets) {
            let c = self.run(x);
            let diff = &c.y - t;
            loss += diff.norm_squared();
            let dy = diff * (2.0 / count as f64);
            let d_o = &dy * &self.out;
            let dp = &d_o * c.v.transpose();
            let dv = c.p.transpose() * &d_o;
            let mut ds = dp.component_mul(&c.p);
            for (i, mut row) in ds.row_iter_mut().enumerate() {
                let dot: f64 = dp.row(i).component_mul(&c.p.row(i)).sum();
                for (j, v) in row.iter_mut().enumerate() {
                    *v -= c.p[(i, j)] * dot;
                }
            }
            let dq = (&ds * &c.k) * scale;
            dwq += dq.transpose() * x;
            dwv += dv.transpose() * x;
        }
        let split = |ad: &LoraAdapter, dw: &DMatrix<f64>| {
            let s = ad.scale();
            (ad.b.transpose() * dw * s, dw * ad.a.transpose() * s)
        };
        let (query_a, query_b) = split(&self.query, &dwq);
        let (value_a, value_b) = split(&self.value, &dwv);
        (loss / count as f64, AdapterGrads { query_a, query_b, value_a, value_b })
    }

    pub fn frozen_digest(&self) -> String {
        let mut h = Sha256::new();
        for m in [self.query.w0(), &self.key, self.value.w0(), &self.out] {
            for v in m.iter() {
                h.update(v.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    pub fn frozen_params(&self) -> usize {
        self.query.w0().len() + self.key.len() + self.value.w0().len() + self.out.len()
    }
}

/// AdamW with decoupled weight decay on one matrix.
#[derive(Debug, Clone)]
pub struct AdamW {
    m: DMatrix<f64>,
    v: DMatrix<f64>,
    t: i32,
}

impl AdamW {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    pub fn new(shape: (usize, usize)) -> AdamW {
        AdamW { m: DMatrix::zeros(shape.0, shape.1), v: DMatrix::zeros(shape.0, shape.1), t: 0 }
    }

    pub fn step(&mut self, p: &mut DMatrix<f64>, g: &DMatrix<f64>, lr: f64, wd: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        for i in 0..p.len() {
            self.m[i] = Self::B1 * self.m[i] + (1.0 - Self::B1) * g[i];
            self.v[i] = Self::B2 * self.v[i] + (1.0 - Self::B2) * g[i] * g[i];
            let update = (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + Self::EPS);
            p[i] -= lr * (update + wd * p[i]);
        }
    }
}

/// Synthetic problem: inputs, teacher outputs, and the student block.
pub struct ToyProblem {
    pub inputs: Vec<DMatrix<f64>>,
    pub targets: Vec<DMatrix<f64>>,
    pub student: AttentionBlock,
}

fn planted(m: usize, rank: usize, scale: f64, rng: &mut impl Rng) -> DMatrix<f64> {
    let u = uniform(m, rank, 1.0, rng);
    let v = uniform(m, rank, 1.0, rng);
    u * v.transpose() * scale
}

pub fn toy_problem(config: &ToyConfig) -> Result<ToyProblem, LoraError> {
    let m = config.d_model;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 1.0 / (m as f64).sqrt();
    let wq = uniform(m, m, bound, &mut rng);
    let wk = uniform(m, m, bound, &mut rng);
    let wv = uniform(m, m, bound, &mut rng);
    let wo = uniform(m, m, bound, &mut rng);
    let dq = planted(m, config.target_rank, config.target_scale, &mut rng);
    let dv = planted(m, config.target_rank, config.target_scale, &mut rng);
    let basis = uniform(config.input_rank, m, 1.0, &mut rng);
    let inputs: Vec<DMatrix<f64>> =
        (0..config.samples).map(|_| uniform(config.seq_len, config.input_rank, 1.0, &mut rng) * &basis).collect();
    let zero = |w: &DMatrix<f64>| LoraAdapter::from_parts(w.clone(), DMatrix::zeros(1, m), DMatrix::zeros(m, 1), 1.0);
    let teacher =
        AttentionBlock { query: zero(&(&wq + dq))?, key: wk.clone(), value: zero(&(&wv + dv))?, out: wo.clone() };
    let targets = inputs.iter().map(|x| teacher.forward(x)).collect();
    let student = AttentionBlock {
        query: LoraAdapter::new(wq, config.rank, config.alpha, &mut rng)?,
        key: wk,
        value: LoraAdapter::new(wv, config.rank, config.alpha, &mut rng)?,
        out: wo,
    };
    Ok(ToyProblem { inputs, targets, student })
}

/// Full-batch AdamW on the adapters only. Returns the trained block and the
/// loss trace.
pub fn toy_finetune(config: &ToyConfig) -> Result<(AttentionBlock, TrainingTrace), LoraError> {
    let ToyProblem { inputs, targets, mut student } = toy_problem(config)?;
    let before = student.frozen_digest();
    let mut opt: Vec<AdamW> =
        [student.query.a.shape(), student.query.b.shape(), student.value.a.shape(), student.value.b.shape()]
            .into_iter()
            .map(AdamW::new)
            .collect();
    let mut losses = Vec::with_capacity(config.steps + 1);
    for step in 0..config.steps {
        let (loss, g) = student.loss_and_grads(&inputs, &targets);
        if !loss.is_finite() {
            return Err(LoraError::Diverged { step });
        }
        losses.push(loss);
        let (lr, wd) = (config.learning_rate, config.weight_decay);
        opt[0].step(&mut student.query.a, &g.query_a, lr, wd);
        opt[1].step(&mut student.query.b, &g.query_b, lr, wd);
        opt[2].step(&mut student.value.a, &g.value_a, lr, wd);
        opt[3].step(&mut student.value.b, &g.value_b, lr, wd);
    }
    let last = student.loss(&inputs, &targets);
    if !last.is_finite() {
        return Err(LoraError::Diverged { step: config.steps });
    }
    losses.push(last);
    let trace = TrainingTrace {
        losses,
        frozen_sha256_before: before,
        frozen_sha256_after: student.frozen_digest(),
        trainable_params: student.query.trainable_params() + student.value.trainable_params(),
        frozen_params: student.frozen_params(),
    };
    Ok((student, trace))
}
