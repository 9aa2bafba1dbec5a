use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::BaselineError;

/// Least squares on a standardized design with an intercept column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub rank: usize,
    /// The design lost rank; the minimum-norm solution was taken.
    pub rank_deficient: bool,
}

impl LinearFit {
    pub fn predict_row(&self, z: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(z).map(|(c, v)| c * v).sum::<f64>()
    }
}

/// Fewest rows accepted: one more than the 17 features.
pub const MIN_ROWS: usize = 18;

pub fn fit_linreg(z: &DMatrix<f64>, y: &DVector<f64>) -> Result<LinearFit, BaselineError> {
    let (n, p) = z.shape();
    if n < MIN_ROWS.max(p + 1) {
        return Err(BaselineError::TooFewRows { rows: n, needed: MIN_ROWS.max(p + 1) });
    }
    let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { z[(i, j - 1)] });
    let svd = design.svd(true, true);
    let s_max = svd.singular_values.max();
    let tol = (n.max(p + 1) as f64) * f64::EPSILON * s_max;
    let rank = svd.rank(tol);
    let beta = svd.solve(y, tol).map_err(|e| BaselineError::Numerical(e.to_string()))?;
    Ok(LinearFit {
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
        rank,
        rank_deficient: rank < p + 1,
    })
}
