//! Fast inexact proximal gradient method.

use serde::{Deserialize, Serialize};

use super::ipgm::{check_start, check_value, lipschitz_at, prox_step};
use super::{FastRecord, RunTrace, ScheduleConfig};
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::oracle::{amgm_additive, InexactOracle};
use crate::prox::ProxFunction;
use crate::random::seeded;

/// How the weights `θ_k` are chosen; both satisfy `θ_{k+1}²/L_{k+1} <= A_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThetaRule {
    /// Largest root of `θ²/L = A_prev + θ/L`, with `θ_0 = 1`.
    #[default]
    EqualityRoot,
    /// `θ_k = (k+1)/2`, meant for constant `L`.
    HalfLinear,
}

impl ThetaRule {
    pub fn initial(self) -> f64 {
        match self {
            Self::EqualityRoot => 1.0,
            Self::HalfLinear => 0.5,
        }
    }
}

/// `θ_{next_index}` given `A_prev = A_{next_index - 1}` and `L_{next_index}`.
pub fn theta_next(a_prev: f64, l_next: f64, rule: ThetaRule, next_index: usize) -> Result<f64> {
    if !(l_next > 0.0) || !l_next.is_finite() {
        return Err(invalid("L_next", format!("must be finite and > 0, got {l_next}")));
    }
    if !(a_prev >= 0.0) {
        return Err(invalid("A_prev", format!("must be >= 0, got {a_prev}")));
    }
    Ok(match rule {
        ThetaRule::EqualityRoot => 0.5 * (1.0 + (1.0 + 4.0 * l_next * a_prev).sqrt()),
        ThetaRule::HalfLinear => (next_index + 1) as f64 / 2.0,
    })
}

/// Runs FI-PGM for `config.max_iters` steps.
///
/// Per step `k` with `L̃_k = L_k + qρ`:
/// `y_k = prox_{α_k h}(x_k - α_k g_k)`, `z_k = prox_h(x_0 - Σ_{i<=k} (θ_i/L̃_i) g_i)`,
/// and `x_{k+1} = τ_k z_k + (1-τ_k) y_k` with `τ_k = θ_{k+1}/(A_{k+1} L̃_{k+1})`.
/// Trace records describe the `y_k` step; `trace.fast` holds `y_k, z_k, θ_k, A_k, τ_k`.
pub fn fipgm_run(
    oracle: &dyn InexactOracle,
    h: &ProxFunction,
    config: &ScheduleConfig,
    x0: &[f64],
    theta_rule: ThetaRule,
    seed: u64,
) -> Result<RunTrace> {
    let f0 = check_start(oracle, h, config, x0)?;
    let q = config.degree;
    let mut rng = seeded(seed);
    let mut trace = RunTrace::new("fipgm", oracle.family(), q, x0.to_vec());
    let mut x = x0.to_vec();
    let mut f = f0;
    let mut s = vec![0.0; x0.len()];

    let mut l_tilde = lipschitz_at(oracle, config, config.delta_at(0))? + q * config.rho;
    let mut theta = theta_rule.initial();
    let mut a = theta / l_tilde;

    for k in 0..config.max_iters {
        let delta_k = config.delta_at(k);
        let l_k = lipschitz_at(oracle, config, delta_k)?;
        let alpha = config.step_at(k, l_k);
        let eval = oracle.eval_at(&x, delta_k, &mut rng)?;

        let (y, gm) = prox_step(h, &x, &eval.gradient, alpha)?;
        let f_y = oracle.value(&y) + h.value(&y);
        check_value(f_y, f0, k + 1)?;

        linalg::axpy(theta / l_tilde, &eval.gradient, &mut s);
        let z = h.prox(1.0, &linalg::sub(x0, &s))?;

        let l_next = lipschitz_at(oracle, config, config.delta_at(k + 1))? + q * config.rho;
        let theta_new = theta_next(a, l_next, theta_rule, k + 1)?;
        let a_new = a + theta_new / l_next;
        let tau = theta_new / (a_new * l_next);
        if !(tau > 0.0 && tau <= 1.0 + 1e-12) {
            return Err(Error::ThetaRule { iteration: k, tau });
        }
        let x_next: Vec<f64> = z.iter().zip(&y).map(|(zi, yi)| tau * zi + (1.0 - tau) * yi).collect();
        let f_next = oracle.value(&x_next) + h.value(&x_next);
        check_value(f_next, f0, k + 1)?;

        trace.fast.push(FastRecord {
            y: y.clone(),
            z,
            theta,
            a,
            tau,
            f_y,
        });
        let additive = amgm_additive(delta_k, q, config.rho);
        trace.push(f, f_y, linalg::norm_sq(&gm), alpha, delta_k, l_k, config.rho, additive, x_next.clone(), eval.gradient);

        x = x_next;
        f = f_next;
        theta = theta_new;
        a = a_new;
        l_tilde = l_next;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Objective;
    use crate::oracle::ExactOracle;
    use crate::problems::QuadraticProblem;

    #[test]
    fn golden_ratio_step() {
        let t = theta_next(1.0, 1.0, ThetaRule::EqualityRoot, 1).unwrap();
        assert!((t - 1.618_033_988_749_895).abs() < 1e-12);
        let a = 1.0 + t;
        assert!((t * t - a).abs() <= 1e-12);
        assert!(theta_next(1.0, 0.0, ThetaRule::EqualityRoot, 1).is_err());
    }

    #[test]
    fn half_linear_condition_holds() {
        let l = 3.0;
        let mut a = 0.5 / l;
        for k in 0..10_000 {
            let t = theta_next(a, l, ThetaRule::HalfLinear, k + 1).unwrap();
            a += t / l;
            assert!(t * t / l <= a * (1.0 + 1e-15));
        }
    }

    #[test]
    fn first_z_equals_first_y() {
        let p = QuadraticProblem::identity(3);
        let o = ExactOracle::new(p, 1.0, 0.0).unwrap().convex();
        let c = ScheduleConfig::constant(1.0, 1.0, 0.0, 0.0, 1);
        let t = fipgm_run(&o, &ProxFunction::Zero, &c, &[1.0, 2.0, -1.0], ThetaRule::EqualityRoot, 0).unwrap();
        assert_eq!(t.fast[0].y, t.fast[0].z);
    }

    #[test]
    fn exact_rate_on_half_square() {
        let n = 5;
        let p = QuadraticProblem::identity(n);
        let o = ExactOracle::new(p.clone(), 1.0, 1.0).unwrap().convex();
        let rho = 1e-6;
        let c = ScheduleConfig::constant(1.0, rho, 1.0, 0.0, 500);
        let x0 = vec![1.0; n];
        let r2 = linalg::norm_sq(&x0);
        for rule in [ThetaRule::EqualityRoot, ThetaRule::HalfLinear] {
            let t = fipgm_run(&o, &ProxFunction::Zero, &c, &x0, rule, 0).unwrap();
            for (k, fr) in t.fast.iter().enumerate() {
                let bound = 4.0 * (1.0 + rho) * r2 / ((k + 1) as f64 * (k + 2) as f64);
                assert!(p.value(&fr.y) <= bound, "{rule:?} k={k}");
                assert!(fr.tau > 0.0 && fr.tau <= 1.0);
            }
        }
    }
}
