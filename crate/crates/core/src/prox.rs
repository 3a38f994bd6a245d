//! Simple convex terms `h` with closed-form proximal maps.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::norm_l1;

/// Relative slack used for ℓ1-ball membership.
const BALL_SLACK: f64 = 1e-12;

/// Re-prox tolerance for [`ProxFunction::implied_subgradient`].
pub const PROX_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProxFunction {
    /// `h = 0`
    #[default]
    Zero,
    /// `h(x) = λ‖x‖₁`
    L1Norm { weight: f64 },
    /// Indicator of `{‖x‖₁ <= R}`.
    L1Ball { radius: f64 },
}

impl ProxFunction {
    pub fn l1_norm(weight: f64) -> Result<Self> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(invalid("weight", format!("must be finite and > 0, got {weight}")));
        }
        Ok(Self::L1Norm { weight })
    }

    pub fn l1_ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("must be finite and > 0, got {radius}")));
        }
        Ok(Self::L1Ball { radius })
    }

    /// `h(x)`; `+∞` outside the ball for the indicator.
    pub fn value(&self, x: &[f64]) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::L1Norm { weight } => weight * norm_l1(x),
            Self::L1Ball { .. } => {
                if self.contains(x) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Whether `x ∈ dom h`.
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Self::Zero | Self::L1Norm { .. } => x.iter().all(|v| v.is_finite()),
            Self::L1Ball { radius } => norm_l1(x) <= radius * (1.0 + BALL_SLACK),
        }
    }

    /// `prox_{γh}(x) = argmin_y h(y) + ‖x - y‖²/(2γ)`
    pub fn prox(&self, gamma: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(invalid("gamma", format!("must be finite and > 0, got {gamma}")));
        }
        Ok(match *self {
            Self::Zero => x.to_vec(),
            Self::L1Norm { weight } => soft_threshold(x, gamma * weight),
            Self::L1Ball { radius } => project_l1_ball(x, radius),
        })
    }

    /// Recovers `p = (pre - post)/γ ∈ ∂h(post)` from `post = prox_{γh}(pre)`.
    ///
    /// Fails with [`Error::InconsistentProx`] when `post` is not the prox of `pre`.
    pub fn implied_subgradient(&self, gamma: f64, pre_prox: &[f64], post_prox: &[f64]) -> Result<Vec<f64>> {
        crate::error::check_dim(pre_prox.len(), post_prox.len())?;
        let again = self.prox(gamma, pre_prox)?;
        let residual = again
            .iter()
            .zip(post_prox)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = 1.0 + pre_prox.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > PROX_CHECK_TOL * scale {
            return Err(Error::InconsistentProx { residual });
        }
        Ok(pre_prox.iter().zip(post_prox).map(|(a, b)| (a - b) / gamma).collect())
    }
}

pub fn soft_threshold(x: &[f64], t: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            if v > t {
                v - t
            } else if v < -t {
                v + t
            } else {
                0.0
            }
        })
        .collect()
}

/// Euclidean projection onto `{‖y‖₁ <= radius}` by sorting magnitudes.
///
/// Points already inside are returned unchanged.
pub fn project_l1_ball(x: &[f64], radius: f64) -> Vec<f64> {
    if norm_l1(x) <= radius {
        return x.to_vec();
    }
    let mut u: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - radius) / (j + 1) as f64;
        if uj > t {
            theta = t;
        } else {
            break;
        }
    }
    x.iter().map(|&v| v.signum() * (v.abs() - theta).max(0.0)).collect()
}
