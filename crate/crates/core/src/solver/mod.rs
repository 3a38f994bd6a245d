//! Inexact proximal gradient solvers and their traces.

mod fipgm;
mod ipgm;
mod trace;

pub use fipgm::{fipgm_run, theta_next, ThetaRule};
pub use ipgm::{ipgm_adaptive_run, ipgm_run, ipgm_worst_case_run, AdaptiveRun, AdaptiveState, MAX_DOUBLINGS};
pub use trace::{ergodic_average, stationarity_gap, FastRecord, GapParams, IterationRecord, RunTrace, TRACE_CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::oracle::validate_degree;

/// Step-size and accuracy schedules.
///
/// `α_k = step_scale / ((L_k + qρ)(k+1)^ζ)` and `δ_k = δ / (k+1)^{β(2-q)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(rename = "L")]
    pub lipschitz: f64,
    pub rho: f64,
    pub degree: f64,
    pub delta0: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub zeta: f64,
    pub max_iters: usize,
    #[serde(default = "one")]
    pub step_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl ScheduleConfig {
    /// Constant schedules (`β = ζ = 0`, `step_scale = 1`).
    pub fn constant(lipschitz: f64, rho: f64, degree: f64, delta0: f64, max_iters: usize) -> Self {
        Self {
            lipschitz,
            rho,
            degree,
            delta0,
            beta: 0.0,
            zeta: 0.0,
            max_iters,
            step_scale: 1.0,
        }
    }

    pub fn with_step_scale(mut self, step_scale: f64) -> Self {
        self.step_scale = step_scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lipschitz > 0.0) || !self.lipschitz.is_finite() {
            return Err(invalid("L", format!("must be finite and > 0, got {}", self.lipschitz)));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(invalid("rho", format!("must be finite and > 0, got {}", self.rho)));
        }
        validate_degree(self.degree)?;
        if !(self.delta0 >= 0.0) || !self.delta0.is_finite() {
            return Err(invalid("delta0", format!("must be finite and >= 0, got {}", self.delta0)));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(invalid("beta", format!("must lie in [0, 1), got {}", self.beta)));
        }
        if !(0.0..1.0).contains(&self.zeta) {
            return Err(invalid("zeta", format!("must lie in [0, 1), got {}", self.zeta)));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be positive"));
        }
        if !(self.step_scale > 0.0 && self.step_scale <= 1.0) {
            return Err(invalid("step_scale", format!("must lie in (0, 1], got {}", self.step_scale)));
        }
        Ok(())
    }

    /// `δ_k`
    pub fn delta_at(&self, k: usize) -> f64 {
        let e = self.beta * (2.0 - self.degree) / 2.0;
        if e == 0.0 {
            self.delta0
        } else {
            self.delta0 / ((k + 1) as f64).powf(e)
        }
    }

    /// `α_k` for certificate constant `l_k`.
    pub fn step_at(&self, k: usize, l_k: f64) -> f64 {
        self.step_with_rho(k, l_k, self.rho)
    }

    pub(crate) fn step_with_rho(&self, k: usize, l_k: f64, rho: f64) -> f64 {
        let denom = l_k + self.degree * rho;
        if self.zeta == 0.0 {
            self.step_scale / denom
        } else {
            self.step_scale / (denom * ((k + 1) as f64).powf(self.zeta))
        }
    }
}
