//! Inexact first-order oracles of degree `q`.
//!
//! An oracle of degree `q ∈ [0, 2)` for `F` returns the exact value `F(y)` and
//! a vector `g(y)` such that for every feasible `x`
//!
//! ```text
//! F(x) - F(y) - <g(y), x - y>  <=  (L/2)‖x - y‖² + δ‖x - y‖^q
//! ```
//!
//! The convex variant additionally claims the left-hand side is nonnegative.
//! [`OracleCertificate`] carries the claimed `(δ, L, q)`; [`certify_oracle`]
//! tests a claim empirically.

mod certify;
mod families;
mod holder;

pub use certify::{
    certify_oracle, BoxSampler, CertificationReport, IntervalSampler, L1BallSampler, PairSampler,
    ViolatingPair,
};
pub use families::{
    eval_minibatch, eval_noisy_gradient, eval_saddle, eval_shifted_point, ExactOracle,
    MinibatchOracle, MinibatchScaling, NoisyGradientOracle, SaddleOracle, SaddleProblem,
    ShiftedPointOracle,
};
pub use holder::{
    eval_holder, holder_lipschitz_coefficient, holder_smoothing_constant, HolderFunction,
    HolderOracle,
};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Claimed `(δ, L, q)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCertificate {
    pub delta: f64,
    pub lipschitz: f64,
    pub degree: f64,
    /// Whether `0 <= F(x) - F(y) - <g(y), x - y>` is also claimed.
    pub convex_lower_bound: bool,
}

impl OracleCertificate {
    pub fn new(delta: f64, lipschitz: f64, degree: f64) -> Result<Self> {
        validate_degree(degree)?;
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(invalid("delta", format!("must be finite and >= 0, got {delta}")));
        }
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(invalid("lipschitz", format!("must be finite and > 0, got {lipschitz}")));
        }
        Ok(Self {
            delta,
            lipschitz,
            degree,
            convex_lower_bound: false,
        })
    }

    pub fn with_convex_lower_bound(mut self, claimed: bool) -> Self {
        self.convex_lower_bound = claimed;
        self
    }

    /// Right-hand side `(L/2) r² + δ r^q` at distance `r`.
    pub fn upper_model(&self, r: f64) -> f64 {
        0.5 * self.lipschitz * r * r + self.delta * pow_zero_one(r, self.degree)
    }
}

/// `r^q` with the convention `0^0 = 1`.
pub(crate) fn pow_zero_one(r: f64, q: f64) -> f64 {
    if q == 0.0 {
        1.0
    } else {
        r.powf(q)
    }
}

pub(crate) fn validate_degree(q: f64) -> Result<()> {
    if (0.0..2.0).contains(&q) {
        Ok(())
    } else {
        Err(invalid("degree", format!("must lie in [0, 2), got {q}")))
    }
}

/// One oracle answer: exact value, approximate gradient, and the claim it satisfies.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleEval {
    pub point: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub certificate: OracleCertificate,
}

impl OracleEval {
    pub fn new(point: Vec<f64>, value: f64, gradient: Vec<f64>, certificate: OracleCertificate) -> Result<Self> {
        crate::error::check_dim(point.len(), gradient.len())?;
        if !value.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { iteration: 0 });
        }
        Ok(Self {
            point,
            value,
            gradient,
            certificate,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleFamily {
    Exact,
    NoisyGradient,
    ShiftedPoint,
    Minibatch,
    Saddle,
    Holder,
}

impl std::fmt::Display for OracleFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Exact => "exact",
            Self::NoisyGradient => "noisy_gradient",
            Self::ShiftedPoint => "shifted_point",
            Self::Minibatch => "minibatch",
            Self::Saddle => "saddle",
            Self::Holder => "holder",
        };
        f.write_str(s)
    }
}

/// A degree-`q` oracle that can be tuned to a requested certificate accuracy.
///
/// Implementations are immutable; all randomness comes from the generator
/// passed to each call.
pub trait InexactOracle: Send + Sync {
    fn family(&self) -> OracleFamily;

    fn dim(&self) -> usize;

    fn degree(&self) -> f64;

    /// Certificate accuracy δ delivered by [`InexactOracle::eval`].
    fn accuracy(&self) -> f64;

    /// Certificate constant `L` that accompanies accuracy `delta`.
    fn lipschitz_for(&self, delta: f64) -> Result<f64>;

    /// Exact zero-order value.
    fn value(&self, x: &[f64]) -> f64;

    /// Oracle answer at `x` whose certificate has accuracy `delta`.
    fn eval_at(&self, x: &[f64], delta: f64, rng: &mut dyn RngCore) -> Result<OracleEval>;

    fn eval(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<OracleEval> {
        self.eval_at(x, self.accuracy(), rng)
    }
}

/// Coefficients of the weighted AM-GM split `δ r^q <= a r² + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Majorant {
    /// `qρ/2`
    pub quad_coeff: f64,
    /// `(2-q) δ^{2/(2-q)} / (2 ρ^{q/(2-q)})`
    pub additive: f64,
}

/// Splits `δ r^q` into a quadratic plus a constant, valid for all `r >= 0`.
pub fn majorize_amgm(delta: f64, degree: f64, rho: f64) -> Result<Majorant> {
    validate_degree(degree)?;
    if !(rho > 0.0) {
        return Err(invalid("rho", format!("must be > 0, got {rho}")));
    }
    if !(delta >= 0.0) {
        return Err(invalid("delta", format!("must be >= 0, got {delta}")));
    }
    Ok(Majorant {
        quad_coeff: degree * rho / 2.0,
        additive: amgm_additive(delta, degree, rho),
    })
}

/// Constant term of the AM-GM split, without validation.
pub(crate) fn amgm_additive(delta: f64, q: f64, rho: f64) -> f64 {
    if q == 0.0 {
        return delta;
    }
    if delta == 0.0 {
        return 0.0;
    }
    // log space keeps q near 2 from overflowing to inf/inf
    let e = 1.0 / (2.0 - q);
    ((2.0 - q).ln() + 2.0 * e * delta.ln() - std::f64::consts::LN_2 - q * e * rho.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_holds(delta: f64, q: f64, m: &Majorant) -> bool {
        (0..=1000).all(|i| {
            let r = i as f64 * 0.01;
            delta * pow_zero_one(r, q) <= m.quad_coeff * r * r + m.additive + 1e-12
        })
    }

    #[test]
    fn degree_zero_passes_delta_through() {
        let m = majorize_amgm(0.7, 0.0, 5.0).unwrap();
        assert_eq!(m.quad_coeff, 0.0);
        assert_eq!(m.additive, 0.7);
    }

    #[test]
    fn unit_case() {
        let m = majorize_amgm(1.0, 1.0, 1.0).unwrap();
        assert!((m.quad_coeff - 0.5).abs() < 1e-15);
        assert!((m.additive - 0.5).abs() < 1e-15);
        assert!(grid_holds(1.0, 1.0, &m));
    }

    #[test]
    fn delta_two_rho_four() {
        let m = majorize_amgm(2.0, 1.0, 4.0).unwrap();
        assert!((m.quad_coeff - 2.0).abs() < 1e-15);
        assert!((m.additive - 0.5).abs() < 1e-15);
        assert!(grid_holds(2.0, 1.0, &m));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(majorize_amgm(1.0, 2.0, 1.0).is_err());
        assert!(majorize_amgm(1.0, -0.1, 1.0).is_err());
        assert!(majorize_amgm(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn certificate_validation() {
        assert!(OracleCertificate::new(0.1, 1.0, 1.0).is_ok());
        assert!(OracleCertificate::new(-0.1, 1.0, 1.0).is_err());
        assert!(OracleCertificate::new(0.1, 0.0, 1.0).is_err());
        assert!(OracleCertificate::new(0.1, 1.0, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn amgm_dominates(delta in 0.0f64..10.0, q in 0.0f64..1.999, rho in 1e-3f64..1e3, r in 0.0f64..100.0) {
            let m = majorize_amgm(delta, q, rho).unwrap();
            let lhs = delta * pow_zero_one(r, q);
            let rhs = m.quad_coeff * r * r + m.additive;
            prop_assert!(lhs <= rhs + 1e-10 * (1.0 + rhs));
        }
    }
}
