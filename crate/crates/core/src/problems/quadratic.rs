//! Convex least-squares test problems with a known minimizer.

use crate::error::{check_dim, invalid, Result};
use crate::linalg::{self, orthonormalize, Matrix};
use crate::objective::{Objective, SmoothObjective};
use crate::random::{seeded, standard_normal_vec};

/// `F(x) = ½‖M x - d‖²` with minimizer `x*` and optimal value `f*`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    operator: Matrix,
    offset: Vec<f64>,
    minimizer: Vec<f64>,
    optimal_value: f64,
    lipschitz: f64,
}

impl QuadraticProblem {
    /// `F(x) = ½‖x‖²`
    pub fn identity(n: usize) -> Self {
        Self {
            operator: Matrix::identity(n),
            offset: vec![0.0; n],
            minimizer: vec![0.0; n],
            optimal_value: 0.0,
            lipschitz: 1.0,
        }
    }

    pub fn operator(&self) -> &Matrix {
        &self.operator
    }
    pub fn offset(&self) -> &[f64] {
        &self.offset
    }
    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }
    pub fn optimal_value(&self) -> f64 {
        self.optimal_value
    }

    /// `R = ‖x0 - x*‖`
    pub fn distance_to_solution(&self, x0: &[f64]) -> f64 {
        linalg::dist(x0, &self.minimizer)
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        linalg::sub(&self.operator.mul_vec(x), &self.offset)
    }
}

impl Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        self.operator.cols()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * linalg::norm_sq(&self.residual(x))
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.operator.tr_mul_vec(&self.residual(x))
    }
}

impl SmoothObjective for QuadraticProblem {
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// `M = Q₁ diag(s) Q₂ᵀ` with `s` log-spaced from 1 down to `1/conditioning`,
/// so the normal matrix has eigenvalues in `[1/conditioning², 1]` and `L = 1`.
/// `x* ~ N(0, I)`, `d = M x*`, `f* = 0`.
pub fn generate_quadratic_instance(n: usize, conditioning: f64, seed: u64) -> Result<QuadraticProblem> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if !(conditioning >= 1.0) || !conditioning.is_finite() {
        return Err(invalid("conditioning", format!("must be finite and >= 1, got {conditioning}")));
    }
    let mut rng = seeded(seed);
    let q1 = orthonormalize(&Matrix::from_row_major(n, n, standard_normal_vec(&mut rng, n * n))?)?;
    let q2 = orthonormalize(&Matrix::from_row_major(n, n, standard_normal_vec(&mut rng, n * n))?)?;
    let singular: Vec<f64> = (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            conditioning.powf(-t)
        })
        .collect();
    let mut scaled = q1.clone();
    for i in 0..n {
        for (j, s) in singular.iter().enumerate() {
            scaled.set(i, j, q1.get(i, j) * s);
        }
    }
    let operator = scaled.matmul(&q2.transpose())?;
    let minimizer = standard_normal_vec(&mut rng, n);
    let offset = operator.mul_vec(&minimizer);
    check_dim(n, offset.len())?;
    Ok(QuadraticProblem {
        operator,
        offset,
        minimizer,
        optimal_value: 0.0,
        lipschitz: 1.0,
    })
}
