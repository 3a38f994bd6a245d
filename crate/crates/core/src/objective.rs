//! Objective handles consumed by oracles and solvers.

use std::sync::Arc;

/// Exact zero-order information plus a (sub)gradient.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// An element of ∂F(x); the gradient when F is differentiable.
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// An objective whose gradient is Lipschitz with a known constant `L_F`.
pub trait SmoothObjective: Objective {
    fn lipschitz(&self) -> f64;
}

impl<T: Objective + ?Sized> Objective for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
}

impl<T: SmoothObjective + ?Sized> SmoothObjective for Arc<T> {
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Closure-backed objective, handy for small analytic test functions.
pub struct FnObjective {
    dim: usize,
    lipschitz: f64,
    value: Box<ValueFn>,
    gradient: Box<GradFn>,
}

impl FnObjective {
    pub fn new(
        dim: usize,
        lipschitz: f64,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            lipschitz,
            value: Box::new(value),
            gradient: Box::new(gradient),
        }
    }

    /// `F(x) = (c/2)‖x‖²`
    pub fn scaled_half_norm_sq(dim: usize, c: f64) -> Self {
        Self::new(
            dim,
            c,
            move |x| 0.5 * c * crate::linalg::norm_sq(x),
            move |x| x.iter().map(|v| c * v).collect(),
        )
    }
}

impl std::fmt::Debug for FnObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnObjective")
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

impl Objective for FnObjective {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
}

impl SmoothObjective for FnObjective {
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}
