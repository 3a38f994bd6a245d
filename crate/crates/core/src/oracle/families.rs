//! Constructive oracle families.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::RngCore;

use super::{InexactOracle, OracleCertificate, OracleEval, OracleFamily};
use crate::error::{check_dim, invalid, Result};
use crate::linalg::{self, Matrix, POWER_ITERS, POWER_REL_TOL};
use crate::objective::{Objective, SmoothObjective};
use crate::random::bounded_perturbation;

fn check_bound(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and >= 0, got {v}")))
    }
}

/// Exact gradient with a user-declared certificate.
#[derive(Debug, Clone)]
pub struct ExactOracle<P> {
    problem: P,
    lipschitz: f64,
    degree: f64,
    convex: bool,
}

impl<P: Objective> ExactOracle<P> {
    pub fn new(problem: P, lipschitz: f64, degree: f64) -> Result<Self> {
        OracleCertificate::new(0.0, lipschitz, degree)?;
        Ok(Self {
            problem,
            lipschitz,
            degree,
            convex: false,
        })
    }

    /// Also claims the convex lower bound (only valid for convex `F`).
    pub fn convex(mut self) -> Self {
        self.convex = true;
        self
    }
}

impl<P: Objective> InexactOracle for ExactOracle<P> {
    fn family(&self) -> OracleFamily {
        OracleFamily::Exact
    }
    fn dim(&self) -> usize {
        self.problem.dim()
    }
    fn degree(&self) -> f64 {
        self.degree
    }
    fn accuracy(&self) -> f64 {
        0.0
    }
    fn lipschitz_for(&self, _delta: f64) -> Result<f64> {
        Ok(self.lipschitz)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.problem.value(x)
    }
    fn eval_at(&self, x: &[f64], delta: f64, _rng: &mut dyn RngCore) -> Result<OracleEval> {
        check_dim(self.problem.dim(), x.len())?;
        let cert = OracleCertificate::new(delta, self.lipschitz, self.degree)?.with_convex_lower_bound(self.convex);
        OracleEval::new(x.to_vec(), self.problem.value(x), self.problem.gradient(x), cert)
    }
}

/// Gradient plus noise of norm at most `Δ` (see [`bounded_perturbation`]), certificate `(Δ, L_F, 1)`.
pub fn eval_noisy_gradient(
    problem: &dyn SmoothObjective,
    x: &[f64],
    noise_norm_bound: f64,
    rng: &mut dyn RngCore,
) -> Result<OracleEval> {
    check_bound("noise_norm_bound", noise_norm_bound)?;
    check_dim(problem.dim(), x.len())?;
    let gradient = noisy(problem.gradient(x), noise_norm_bound, rng);
    let cert = OracleCertificate::new(noise_norm_bound, problem.lipschitz(), 1.0)?;
    OracleEval::new(x.to_vec(), problem.value(x), gradient, cert)
}

fn noisy(mut g: Vec<f64>, bound: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    if bound > 0.0 {
        let e = bounded_perturbation(rng, g.len(), bound);
        for (gi, ei) in g.iter_mut().zip(&e) {
            *gi += ei;
        }
    }
    g
}

/// Noisy-gradient oracle, optionally restricted to a set of bounded diameter.
///
/// On a set contained in the Euclidean ball of radius `R`,
/// `Δ‖x - y‖ <= Δ(2R)^{1-q}‖x - y‖^q`, so the same oracle is certified for
/// every degree `q ∈ [0, 1]` with `δ = Δ(2R)^{1-q}`.
#[derive(Debug, Clone)]
pub struct NoisyGradientOracle<P> {
    problem: P,
    noise_bound: f64,
    degree: f64,
    /// `(2R)^{1-q}`, or 1 on unbounded domains.
    reduction: f64,
    claim_scale: f64,
}

impl<P: SmoothObjective> NoisyGradientOracle<P> {
    pub fn new(problem: P, noise_bound: f64) -> Result<Self> {
        check_bound("noise_bound", noise_bound)?;
        Ok(Self {
            problem,
            noise_bound,
            degree: 1.0,
            reduction: 1.0,
            claim_scale: 1.0,
        })
    }

    /// Re-certifies at degree `q ∈ [0, 1]` on a domain inside the ball `‖x‖ <= radius`.
    pub fn on_ball(mut self, radius: f64, degree: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("radius", format!("must be > 0, got {radius}")));
        }
        if !(0.0..=1.0).contains(&degree) {
            return Err(invalid("degree", format!("bounded-domain reduction needs q in [0, 1], got {degree}")));
        }
        self.degree = degree;
        self.reduction = (2.0 * radius).powf(1.0 - degree);
        Ok(self)
    }

    /// Multiplies the reported δ by `scale` without changing the noise.
    ///
    /// `scale < 1` produces a deliberately understated (invalid) claim.
    pub fn with_claim_scale(mut self, scale: f64) -> Self {
        self.claim_scale = scale;
        self
    }

    pub fn noise_bound(&self) -> f64 {
        self.noise_bound
    }

    pub fn problem(&self) -> &P {
        &self.problem
    }
}

impl<P: SmoothObjective> InexactOracle for NoisyGradientOracle<P> {
    fn family(&self) -> OracleFamily {
        OracleFamily::NoisyGradient
    }
    fn dim(&self) -> usize {
        self.problem.dim()
    }
    fn degree(&self) -> f64 {
        self.degree
    }
    fn accuracy(&self) -> f64 {
        self.noise_bound * self.reduction
    }
    fn lipschitz_for(&self, _delta: f64) -> Result<f64> {
        Ok(self.problem.lipschitz())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.problem.value(x)
    }
    fn eval_at(&self, x: &[f64], delta: f64, rng: &mut dyn RngCore) -> Result<OracleEval> {
        check_bound("delta", delta)?;
        check_dim(self.problem.dim(), x.len())?;
        let bound = delta / self.reduction;
        let gradient = noisy(self.problem.gradient(x), bound, rng);
        let cert = OracleCertificate::new(delta * self.claim_scale, self.problem.lipschitz(), self.degree)?;
        OracleEval::new(x.to_vec(), self.problem.value(x), gradient, cert)
    }
}

/// Exact gradient taken at a point `x̄` with `‖x - x̄‖ <= shift_bound`.
///
/// Certificate `(L_F · shift_bound, L_F, 1)`; the value stays exact at `x`.
pub fn eval_shifted_point(
    problem: &dyn SmoothObjective,
    x: &[f64],
    shift_bound: f64,
    rng: &mut dyn RngCore,
) -> Result<OracleEval> {
    check_bound("shift_bound", shift_bound)?;
    check_dim(problem.dim(), x.len())?;
    let gradient = shifted_gradient(problem, x, shift_bound, rng);
    let lf = problem.lipschitz();
    let cert = OracleCertificate::new(lf * shift_bound, lf, 1.0)?;
    OracleEval::new(x.to_vec(), problem.value(x), gradient, cert)
}

fn shifted_gradient(problem: &dyn SmoothObjective, x: &[f64], bound: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    if bound > 0.0 {
        let shifted = linalg::add(x, &bounded_perturbation(rng, x.len(), bound));
        problem.gradient(&shifted)
    } else {
        problem.gradient(x)
    }
}

#[derive(Debug, Clone)]
pub struct ShiftedPointOracle<P> {
    problem: P,
    shift_bound: f64,
}

impl<P: SmoothObjective> ShiftedPointOracle<P> {
    pub fn new(problem: P, shift_bound: f64) -> Result<Self> {
        check_bound("shift_bound", shift_bound)?;
        Ok(Self { problem, shift_bound })
    }
}

impl<P: SmoothObjective> InexactOracle for ShiftedPointOracle<P> {
    fn family(&self) -> OracleFamily {
        OracleFamily::ShiftedPoint
    }
    fn dim(&self) -> usize {
        self.problem.dim()
    }
    fn degree(&self) -> f64 {
        1.0
    }
    fn accuracy(&self) -> f64 {
        self.problem.lipschitz() * self.shift_bound
    }
    fn lipschitz_for(&self, _delta: f64) -> Result<f64> {
        Ok(self.problem.lipschitz())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.problem.value(x)
    }
    fn eval_at(&self, x: &[f64], delta: f64, rng: &mut dyn RngCore) -> Result<OracleEval> {
        check_bound("delta", delta)?;
        let lf = self.problem.lipschitz();
        let mut eval = eval_shifted_point(&self.problem, x, delta / lf, rng)?;
        eval.certificate.delta = delta;
        Ok(eval)
    }
}

/// How a mini-batch average relates to the full objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinibatchScaling {
    /// `F = (1/N) Σ F_i`, `g_S = (1/|S|) Σ_{j∈S} ∇F_j`.
    #[default]
    Mean,
    /// `F = Σ F_i`, `g_S = (N/|S|) Σ_{j∈S} ∇F_j`.
    Sum,
}

/// Mini-batch gradient over `batch` (0-based indices).
///
/// No certificate is derived here: `claimed` is passed through as-is.
pub fn eval_minibatch(
    components: &[Arc<dyn Objective>],
    x: &[f64],
    batch: &[usize],
    scaling: MinibatchScaling,
    claimed: OracleCertificate,
) -> Result<OracleEval> {
    if batch.is_empty() {
        return Err(invalid("batch", "must be nonempty"));
    }
    let n_comp = components.len();
    if let Some(bad) = batch.iter().find(|&&j| j >= n_comp) {
        return Err(invalid("batch", format!("index {bad} out of range for {n_comp} components")));
    }
    let dim = x.len();
    for c in components {
        check_dim(c.dim(), dim)?;
    }
    let mut g = vec![0.0; dim];
    for &j in batch {
        linalg::axpy(1.0, &components[j].gradient(x), &mut g);
    }
    let full: f64 = components.iter().map(|c| c.value(x)).sum();
    let (factor, value) = match scaling {
        MinibatchScaling::Mean => (1.0 / batch.len() as f64, full / n_comp as f64),
        MinibatchScaling::Sum => (n_comp as f64 / batch.len() as f64, full),
    };
    for gi in g.iter_mut() {
        *gi *= factor;
    }
    OracleEval::new(x.to_vec(), value, g, claimed)
}

/// Samples a fresh batch (without replacement) on every call.
pub struct MinibatchOracle {
    components: Vec<Arc<dyn Objective>>,
    batch_size: usize,
    scaling: MinibatchScaling,
    claimed: OracleCertificate,
}

impl MinibatchOracle {
    pub fn new(
        components: Vec<Arc<dyn Objective>>,
        batch_size: usize,
        scaling: MinibatchScaling,
        claimed: OracleCertificate,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("components", "must be nonempty"));
        }
        if batch_size == 0 || batch_size > components.len() {
            return Err(invalid("batch_size", format!("must be in 1..={}", components.len())));
        }
        Ok(Self {
            components,
            batch_size,
            scaling,
            claimed,
        })
    }
}

impl InexactOracle for MinibatchOracle {
    fn family(&self) -> OracleFamily {
        OracleFamily::Minibatch
    }
    fn dim(&self) -> usize {
        self.components[0].dim()
    }
    fn degree(&self) -> f64 {
        self.claimed.degree
    }
    fn accuracy(&self) -> f64 {
        self.claimed.delta
    }
    fn lipschitz_for(&self, _delta: f64) -> Result<f64> {
        Ok(self.claimed.lipschitz)
    }
    fn value(&self, x: &[f64]) -> f64 {
        let full: f64 = self.components.iter().map(|c| c.value(x)).sum();
        match self.scaling {
            MinibatchScaling::Mean => full / self.components.len() as f64,
            MinibatchScaling::Sum => full,
        }
    }
    fn eval_at(&self, x: &[f64], _delta: f64, rng: &mut dyn RngCore) -> Result<OracleEval> {
        let mut batch = sample(rng, self.components.len(), self.batch_size).into_vec();
        batch.sort_unstable();
        eval_minibatch(&self.components, x, &batch, self.scaling, self.claimed)
    }
}

/// `F(x) = max_u G(u) + <Au, x>` with `G(u) = -(κ/2)‖u - c‖²`.
///
/// `A` maps the `u`-space (dimension `m`) into the `x`-space (dimension `n`),
/// so it is stored as an `n × m` matrix.
#[derive(Debug, Clone)]
pub struct SaddleProblem {
    operator: Matrix,
    center: Vec<f64>,
    concavity: f64,
    op_norm: f64,
}

impl SaddleProblem {
    pub fn new(operator: Matrix, center: Vec<f64>, concavity: f64) -> Result<Self> {
        if !(concavity > 0.0) {
            return Err(invalid("concavity", format!("must be > 0, got {concavity}")));
        }
        check_dim(operator.cols(), center.len())?;
        let op_norm = operator.spectral_norm(POWER_ITERS, POWER_REL_TOL)?;
        Ok(Self {
            operator,
            center,
            concavity,
            op_norm,
        })
    }

    pub fn operator_norm(&self) -> f64 {
        self.op_norm
    }

    /// `u*(x) = c + (1/κ) Aᵀx`
    pub fn maximizer(&self, x: &[f64]) -> Vec<f64> {
        let mut u = self.center.clone();
        linalg::axpy(1.0 / self.concavity, &self.operator.tr_mul_vec(x), &mut u);
        u
    }

    /// `ψ(x, u)`
    pub fn coupling(&self, x: &[f64], u: &[f64]) -> f64 {
        -0.5 * self.concavity * linalg::dist_sq(u, &self.center) + linalg::dot(&self.operator.mul_vec(u), x)
    }
}

impl Objective for SaddleProblem {
    fn dim(&self) -> usize {
        self.operator.rows()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.coupling(x, &self.maximizer(x))
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.operator.mul_vec(&self.maximizer(x))
    }
}

impl SmoothObjective for SaddleProblem {
    fn lipschitz(&self) -> f64 {
        self.op_norm * self.op_norm / self.concavity
    }
}

/// Gradient `A u_x` from an approximate maximizer with `‖u*(x) - u_x‖ <= inner_accuracy`.
///
/// Certificate `(inner_accuracy · ‖A‖, ‖A‖²/κ, 1)`.
pub fn eval_saddle(
    saddle: &SaddleProblem,
    x: &[f64],
    inner_accuracy: f64,
    rng: &mut dyn RngCore,
) -> Result<OracleEval> {
    check_bound("inner_accuracy", inner_accuracy)?;
    check_dim(saddle.dim(), x.len())?;
    let u_star = saddle.maximizer(x);
    let value = saddle.coupling(x, &u_star);
    let u_x = if inner_accuracy > 0.0 {
        linalg::add(&u_star, &bounded_perturbation(rng, u_star.len(), inner_accuracy))
    } else {
        u_star
    };
    let gradient = saddle.operator.mul_vec(&u_x);
    let cert = OracleCertificate::new(inner_accuracy * saddle.op_norm, saddle.lipschitz(), 1.0)?;
    OracleEval::new(x.to_vec(), value, gradient, cert)
}

#[derive(Debug, Clone)]
pub struct SaddleOracle {
    saddle: SaddleProblem,
    inner_accuracy: f64,
}

impl SaddleOracle {
    pub fn new(saddle: SaddleProblem, inner_accuracy: f64) -> Result<Self> {
        check_bound("inner_accuracy", inner_accuracy)?;
        Ok(Self { saddle, inner_accuracy })
    }

    pub fn problem(&self) -> &SaddleProblem {
        &self.saddle
    }
}

impl InexactOracle for SaddleOracle {
    fn family(&self) -> OracleFamily {
        OracleFamily::Saddle
    }
    fn dim(&self) -> usize {
        self.saddle.dim()
    }
    fn degree(&self) -> f64 {
        1.0
    }
    fn accuracy(&self) -> f64 {
        self.inner_accuracy * self.saddle.op_norm
    }
    fn lipschitz_for(&self, _delta: f64) -> Result<f64> {
        Ok(self.saddle.lipschitz())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.saddle.value(x)
    }
    fn eval_at(&self, x: &[f64], delta: f64, rng: &mut dyn RngCore) -> Result<OracleEval> {
        check_bound("delta", delta)?;
        let inner = if self.saddle.op_norm > 0.0 { delta / self.saddle.op_norm } else { 0.0 };
        let mut eval = eval_saddle(&self.saddle, x, inner, rng)?;
        eval.certificate.delta = delta;
        Ok(eval)
    }
}
