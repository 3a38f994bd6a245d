//! Empirical check of an oracle's claimed certificate.

use rand::{Rng, RngCore};
use serde::Serialize;

use super::{pow_zero_one, InexactOracle};
use crate::error::{check_dim, invalid, Result};
use crate::linalg;
use crate::objective::Objective;
use crate::random::{seeded, uniform_box, uniform_l1_ball};

/// Draws point pairs `(x, y)` inside a convex test domain.
pub trait PairSampler: Send + Sync {
    fn dim(&self) -> usize;

    /// One point drawn from the domain.
    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    /// Half the pairs are independent; the rest put `y` on the segment
    /// towards `x` at a log-uniform fraction in `[1e-3, 1]`, so short
    /// distances get exercised too.
    fn sample_pair(&self, rng: &mut dyn RngCore) -> (Vec<f64>, Vec<f64>) {
        let x = self.sample_point(rng);
        let z = self.sample_point(rng);
        if rng.random_bool(0.5) {
            (x, z)
        } else {
            let t = 10f64.powf(-3.0 * rng.random::<f64>());
            let y = x.iter().zip(&z).map(|(a, b)| a + t * (b - a)).collect();
            (x, y)
        }
    }
}

/// Uniform points in the box `[lo, hi]^n`.
#[derive(Debug, Clone, Copy)]
pub struct BoxSampler {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl PairSampler for BoxSampler {
    fn dim(&self) -> usize {
        self.dim
    }
    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        uniform_box(rng, self.dim, self.lo, self.hi)
    }
}

/// Uniform points in the ℓ1 ball of radius `radius`.
#[derive(Debug, Clone, Copy)]
pub struct L1BallSampler {
    pub dim: usize,
    pub radius: f64,
}

impl PairSampler for L1BallSampler {
    fn dim(&self) -> usize {
        self.dim
    }
    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        uniform_l1_ball(rng, self.dim, self.radius)
    }
}

/// Uniform points on the real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct IntervalSampler {
    pub lo: f64,
    pub hi: f64,
}

impl PairSampler for IntervalSampler {
    fn dim(&self) -> usize {
        1
    }
    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        uniform_box(rng, 1, self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolatingPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Amount by which the upper inequality fails, or by which the lower gap is negative.
    pub violation: f64,
    pub lower_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub pairs: usize,
    pub tolerance: f64,
    /// `max F(x) - F(y) - <g(y), x-y> - (L/2)‖x-y‖² - δ‖x-y‖^q`
    pub max_violation: f64,
    /// `min F(x) - F(y) - <g(y), x-y>`, when the convex lower bound is claimed.
    pub min_lower_gap: Option<f64>,
    /// Worst offending pair, present only when certification fails.
    pub worst: Option<ViolatingPair>,
    pub certified: bool,
}

/// Tests the oracle's claimed certificate on `pairs` sampled pairs.
///
/// The oracle is queried at `y` and the inequality is checked at `x`.
pub fn certify_oracle(
    oracle: &dyn InexactOracle,
    objective: &dyn Objective,
    sampler: &dyn PairSampler,
    pairs: usize,
    tolerance: f64,
    seed: u64,
) -> Result<CertificationReport> {
    if pairs == 0 {
        return Err(invalid("pairs", "must be positive"));
    }
    if !(tolerance >= 0.0) {
        return Err(invalid("tolerance", format!("must be >= 0, got {tolerance}")));
    }
    check_dim(oracle.dim(), sampler.dim())?;
    check_dim(objective.dim(), sampler.dim())?;

    let mut rng = seeded(seed);
    let mut max_violation = f64::NEG_INFINITY;
    let mut min_lower: Option<f64> = None;
    let mut worst_upper: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut worst_lower: Option<(Vec<f64>, Vec<f64>)> = None;

    for _ in 0..pairs {
        let (x, y) = sampler.sample_pair(&mut rng);
        let eval = oracle.eval(&y, &mut rng)?;
        let cert = eval.certificate;
        let d = linalg::sub(&x, &y);
        let gap = objective.value(&x) - eval.value - linalg::dot(&eval.gradient, &d);
        let r = linalg::norm(&d);
        let model = 0.5 * cert.lipschitz * r * r + cert.delta * pow_zero_one(r, cert.degree);
        let v = gap - model;
        if v > max_violation {
            max_violation = v;
            worst_upper = Some((x.clone(), y.clone()));
        }
        if cert.convex_lower_bound && min_lower.is_none_or(|m| gap < m) {
            min_lower = Some(gap);
            worst_lower = Some((x, y));
        }
    }

    let upper_ok = max_violation <= tolerance;
    let lower_ok = min_lower.is_none_or(|m| m >= -tolerance);
    let worst = if !upper_ok {
        worst_upper.map(|(x, y)| ViolatingPair {
            x,
            y,
            violation: max_violation,
            lower_bound: false,
        })
    } else if !lower_ok {
        worst_lower.map(|(x, y)| ViolatingPair {
            x,
            y,
            violation: -min_lower.unwrap_or(0.0),
            lower_bound: true,
        })
    } else {
        None
    };
    Ok(CertificationReport {
        pairs,
        tolerance,
        max_violation,
        min_lower_gap: min_lower,
        worst,
        certified: upper_ok && lower_ok,
    })
}
