use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::LoraError;

/// Trainable parameters in a rank-`r` adapter on a `d`×`k` matrix.
pub fn param_count(d: usize, k: usize, r: usize) -> Result<usize, LoraError> {
    if d == 0 || k == 0 {
        return Err(LoraError::InvalidShape { d, k });
    }
    if r == 0 {
        return Err(LoraError::InvalidRank { rank: r });
    }
    Ok(r * (d + k))
}

/// Frozen `w0` (d×k) plus the low-rank update `(alpha/r)·B·A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoraAdapter {
    w0: DMatrix<f64>,
    /// r×k
    pub a: DMatrix<f64>,
    /// d×r
    pub b: DMatrix<f64>,
    pub alpha: f64,
}

impl LoraAdapter {
    /// `A` uniform in ±1/√k, `B` zero.
    pub fn new(w0: DMatrix<f64>, rank: usize, alpha: f64, rng: &mut impl Rng) -> Result<LoraAdapter, LoraError> {
        let (d, k) = w0.shape();
        param_count(d, k, rank)?;
        let bound = 1.0 / (k as f64).sqrt();
        let a = DMatrix::from_fn(rank, k, |_, _| rng.random_range(-bound..bound));
        Ok(LoraAdapter { w0, a, b: DMatrix::zeros(d, rank), alpha })
    }

    pub fn from_parts(
        w0: DMatrix<f64>,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        alpha: f64,
    ) -> Result<LoraAdapter, LoraError> {
        let (d, k) = w0.shape();
        if a.ncols() != k || b.nrows() != d || a.nrows() != b.ncols() {
            return Err(LoraError::DimensionMismatch {
                expected: format!("A r×{k}, B {d}×r"),
                found: format!("A {}×{}, B {}×{}", a.nrows(), a.ncols(), b.nrows(), b.ncols()),
            });
        }
        param_count(d, k, a.nrows())?;
        Ok(LoraAdapter { w0, a, b, alpha })
    }

    pub fn w0(&self) -> &DMatrix<f64> {
        &self.w0
    }

    pub fn rank(&self) -> usize {
        self.a.nrows()
    }

    pub fn scale(&self) -> f64 {
        self.alpha / self.rank() as f64
    }

    pub fn trainable_params(&self) -> usize {
        self.a.len() + self.b.len()
    }

    /// `W0·x + (alpha/r)·B·(A·x)` without forming `B·A`.
    pub fn forward(&self, x: &DVector<f64>) -> Result<DVector<f64>, LoraError> {
        if x.len() != self.w0.ncols() {
            return Err(LoraError::DimensionMismatch {
                expected: format!("input of length {}", self.w0.ncols()),
                found: format!("length {}", x.len()),
            });
        }
        let ax = &self.a * x;
        Ok(&self.w0 * x + (&self.b * ax) * self.scale())
    }

    /// `W0 + (alpha/r)·B·A`.
    pub fn merge(&self) -> DMatrix<f64> {
        &self.w0 + (&self.b * &self.a) * self.scale()
    }

    /// Gradients of a loss with respect to `A` and `B` given the upstream
    /// gradient `g` at the output for input `x`.
    pub fn backward(&self, x: &DVector<f64>, g: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let s = self.scale();
        let grad_b = (g * (&self.a * x).transpose()) * s;
        let grad_a = ((self.b.transpose() * g) * x.transpose()) * s;
        (grad_a, grad_b)
    }
}

/// Largest relative gap between analytic and central-difference gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub max_relative_error: f64,
    pub grad_a: DMatrix<f64>,
    pub grad_b: DMatrix<f64>,
    pub entries_checked: usize,
}

/// Relative error with a floor so that two tiny values compare as equal.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale < 1e-10 {
        0.0
    } else {
        (analytic - numeric).abs() / scale
    }
}

/// `loss` maps an output vector to (value, gradient at the output). The loss
/// is summed over `inputs`; `entries` random entries of `A` and of `B` are
/// probed with step `h`.
pub fn grad_check(
    adapter: &LoraAdapter,
    inputs: &[DVector<f64>],
    loss: &dyn Fn(&DVector<f64>) -> (f64, DVector<f64>),
    entries: usize,
    rng: &mut impl Rng,
) -> Result<GradCheck, LoraError> {
    let total = |ad: &LoraAdapter| -> Result<f64, LoraError> {
        let mut acc = 0.0;
        for x in inputs {
            acc += loss(&ad.forward(x)?).0;
        }
        Ok(acc)
    };
    let mut grad_a = DMatrix::zeros(adapter.a.nrows(), adapter.a.ncols());
    let mut grad_b = DMatrix::zeros(adapter.b.nrows(), adapter.b.ncols());
    for x in inputs {
        let (_, g) = loss(&adapter.forward(x)?);
        let (ga, gb) = adapter.backward(x, &g);
        grad_a += ga;
        grad_b += gb;
    }
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for probe in 0..2 * entries {
        let on_a = probe % 2 == 0;
        let (rows, cols) = if on_a { adapter.a.shape() } else { adapter.b.shape() };
        let (i, j) = (rng.random_range(0..rows), rng.random_range(0..cols));
        let mut plus = adapter.clone();
        let mut minus = adapter.clone();
        if on_a {
            plus.a[(i, j)] += h;
            minus.a[(i, j)] -= h;
        } else {
            plus.b[(i, j)] += h;
            minus.b[(i, j)] -= h;
        }
        let numeric = (total(&plus)? - total(&minus)?) / (2.0 * h);
        let analytic = if on_a { grad_a[(i, j)] } else { grad_b[(i, j)] };
        worst = worst.max(relative_error(analytic, numeric));
    }
    Ok(GradCheck { max_relative_error: worst, grad_a, grad_b, entries_checked: 2 * entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn counts() {
        assert_eq!(param_count(4096, 4096, 8).unwrap(), 65_536);
        assert_eq!(param_count(10, 6, 2).unwrap(), 32);
        assert!(matches!(param_count(10, 6, 0), Err(LoraError::InvalidRank { rank: 0 })));
    }

    #[test]
    fn zero_b_is_identity_update() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ad = LoraAdapter::new(random(6, 5, &mut rng), 2, 4.0, &mut rng).unwrap();
        let x = DVector::from_fn(5, |i, _| i as f64 - 2.0);
        assert_eq!(ad.forward(&x).unwrap(), ad.w0() * &x);
        assert_eq!(ad.merge(), *ad.w0());
    }

    #[test]
    fn wrong_input_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ad = LoraAdapter::new(random(3, 4, &mut rng), 1, 1.0, &mut rng).unwrap();
        assert!(matches!(ad.forward(&DVector::zeros(3)), Err(LoraError::DimensionMismatch { .. })));
    }

    #[test]
    fn constant_loss_has_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut ad = LoraAdapter::new(random(8, 8, &mut rng), 2, 2.0, &mut rng).unwrap();
        ad.b = random(8, 2, &mut rng);
        let xs = vec![DVector::from_fn(8, |i, _| i as f64)];
        let flat = |y: &DVector<f64>| (1.0, DVector::zeros(y.len()));
        let g = grad_check(&ad, &xs, &flat, 10, &mut rng).unwrap();
        assert!(g.grad_a.iter().chain(g.grad_b.iter()).all(|&v| v == 0.0));
        assert_eq!(g.max_relative_error, 0.0);
    }

    #[test]
    fn zero_b_blocks_the_gradient_to_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ad = LoraAdapter::new(random(8, 8, &mut rng), 2, 2.0, &mut rng).unwrap();
        let xs = vec![DVector::from_fn(8, |i, _| 1.0 + i as f64)];
        let quad = |y: &DVector<f64>| (y.norm_squared(), y * 2.0);
        let g = grad_check(&ad, &xs, &quad, 5, &mut rng).unwrap();
        assert!(g.grad_a.iter().all(|&v| v == 0.0));
        assert!(g.grad_b.amax() > 0.0);
    }
}
