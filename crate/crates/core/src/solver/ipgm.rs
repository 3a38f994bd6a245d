//! Inexact proximal gradient method and its adaptive variant.

use rand::RngCore;
use serde::Serialize;

use super::{RunTrace, ScheduleConfig};
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg;
use crate::oracle::{amgm_additive, InexactOracle, OracleEval};
use crate::prox::ProxFunction;
use crate::random::{derive_seed, seeded};
use crate::rates::rho_opt_fixed_horizon;

/// Cap on ε-doublings per adaptive iteration.
pub const MAX_DOUBLINGS: usize = 64;

/// Stream key for worst-case candidates after the first.
const CANDIDATE_STREAM: u64 = 0x5752_4f4e_4721;

pub(crate) fn check_start(oracle: &dyn InexactOracle, h: &ProxFunction, config: &ScheduleConfig, x0: &[f64]) -> Result<f64> {
    config.validate()?;
    check_dim(oracle.dim(), x0.len())?;
    if (oracle.degree() - config.degree).abs() > 1e-12 {
        return Err(Error::OracleMismatch {
            expected: format!("degree {}", config.degree),
            found: format!("degree {}", oracle.degree()),
        });
    }
    if !h.contains(x0) {
        return Err(Error::Infeasible);
    }
    let f0 = oracle.value(x0) + h.value(x0);
    if !f0.is_finite() {
        return Err(Error::NonFinite { iteration: 0 });
    }
    Ok(f0)
}

pub(crate) fn check_value(f: f64, f0: f64, iteration: usize) -> Result<()> {
    if !f.is_finite() {
        return Err(Error::NonFinite { iteration });
    }
    if f > f0 + 1e6 * (1.0 + f0.abs()) {
        return Err(Error::Diverged { iteration, value: f });
    }
    Ok(())
}

/// `L_k = max(L, L(δ_k))`
pub(crate) fn lipschitz_at(oracle: &dyn InexactOracle, config: &ScheduleConfig, delta_k: f64) -> Result<f64> {
    Ok(config.lipschitz.max(oracle.lipschitz_for(delta_k)?))
}

/// One prox step: returns `x_{k+1}` and the gradient mapping `g + p`.
pub(crate) fn prox_step(h: &ProxFunction, x: &[f64], g: &[f64], alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let pre: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi - alpha * gi).collect();
    let post = h.prox(alpha, &pre)?;
    let gm = g
        .iter()
        .zip(pre.iter().zip(&post))
        .map(|(gi, (a, b))| gi + (a - b) / alpha)
        .collect();
    Ok((post, gm))
}

/// Runs I-PGM: `x_{k+1} = prox_{α_k h}(x_k - α_k g_k)` for `config.max_iters` steps.
///
/// `seed` drives the oracle's randomness.
pub fn ipgm_run(
    oracle: &dyn InexactOracle,
    h: &ProxFunction,
    config: &ScheduleConfig,
    x0: &[f64],
    seed: u64,
) -> Result<RunTrace> {
    run(oracle, h, config, x0, seed, 1)
}

/// I-PGM where each step draws `directions` oracle answers and keeps the one
/// with the largest displacement `‖x_{k+1} - x_k‖` (first wins ties).
///
/// The first candidate uses the same stream as [`ipgm_run`], so
/// `directions = 1` reproduces it exactly.
pub fn ipgm_worst_case_run(
    oracle: &dyn InexactOracle,
    h: &ProxFunction,
    config: &ScheduleConfig,
    x0: &[f64],
    seed: u64,
    directions: usize,
) -> Result<RunTrace> {
    if directions == 0 {
        return Err(invalid("directions", "must be >= 1"));
    }
    let mut t = run(oracle, h, config, x0, seed, directions)?;
    t.adversarial = directions > 1;
    Ok(t)
}

fn run(
    oracle: &dyn InexactOracle,
    h: &ProxFunction,
    config: &ScheduleConfig,
    x0: &[f64],
    seed: u64,
    directions: usize,
) -> Result<RunTrace> {
    let f0 = check_start(oracle, h, config, x0)?;
    let mut primary = seeded(seed);
    let mut secondary = seeded(derive_seed(seed, &[CANDIDATE_STREAM]));
    let mut trace = RunTrace::new("ipgm", oracle.family(), config.degree, x0.to_vec());
    let mut x = x0.to_vec();
    let mut f = f0;
    for k in 0..config.max_iters {
        let delta_k = config.delta_at(k);
        let l_k = lipschitz_at(oracle, config, delta_k)?;
        let alpha = config.step_at(k, l_k);

        let mut best: Option<(f64, OracleEval, Vec<f64>, Vec<f64>)> = None;
        for c in 0..directions {
            let rng: &mut dyn RngCore = if c == 0 { &mut primary } else { &mut secondary };
            let eval = oracle.eval_at(&x, delta_k, rng)?;
            let (post, gm) = prox_step(h, &x, &eval.gradient, alpha)?;
            let disp = linalg::dist_sq(&post, &x);
            if best.as_ref().is_none_or(|b| disp > b.0) {
                best = Some((disp, eval, post, gm));
            }
        }
        let (_, eval, x_next, gm) = best.expect("at least one candidate");

        let f_next = oracle.value(&x_next) + h.value(&x_next);
        check_value(f_next, f0, k + 1)?;
        let additive = amgm_additive(delta_k, config.degree, config.rho);
        trace.push(
            f,
            f_next,
            linalg::norm_sq(&gm),
            alpha,
            delta_k,
            l_k,
            config.rho,
            additive,
            x_next.clone(),
            eval.gradient,
        );
        x = x_next;
        f = f_next;
    }
    Ok(trace)
}

/// Bookkeeping of the adaptive variant at one accepted iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveState {
    pub k: usize,
    /// `ε_k` at acceptance (after any doublings).
    pub epsilon: f64,
    /// `f_best^k = min_{j<=k} f(x_j) - ε_k`
    pub f_best: f64,
    /// `min_{j<=k} f(x_j)`
    pub min_f: f64,
    pub retries: usize,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveRun {
    pub trace: RunTrace,
    pub states: Vec<AdaptiveState>,
}

/// I-PGM for unknown `f∞`: ρ is re-chosen each step from the fixed-horizon
/// rule with `Δ0^k = f(x_0) - f_best^k`, and the estimate is loosened by
/// doubling `ε` whenever the new point undercuts it.
///
/// The fixed-horizon rule needs `q >= 1`; for smaller `q` the configured ρ is
/// kept and only `ε` is tracked.
pub fn ipgm_adaptive_run(
    oracle: &dyn InexactOracle,
    h: &ProxFunction,
    base_config: &ScheduleConfig,
    x0: &[f64],
    epsilon0: f64,
    seed: u64,
) -> Result<AdaptiveRun> {
    if !(epsilon0 > 0.0) || !epsilon0.is_finite() {
        return Err(invalid("epsilon0", format!("must be finite and > 0, got {epsilon0}")));
    }
    let config = base_config;
    let f0 = check_start(oracle, h, config, x0)?;
    let q = config.degree;
    let horizon = (config.max_iters - 1) as f64;
    let mut rng = seeded(seed);
    let mut trace = RunTrace::new("ipgm_adaptive", oracle.family(), q, x0.to_vec());
    let mut states = Vec::with_capacity(config.max_iters);
    let mut x = x0.to_vec();
    let mut f = f0;
    let mut epsilon = epsilon0;
    let mut min_f = f0;
    let mut f_best = f0 - epsilon;

    for k in 0..config.max_iters {
        let delta_k = config.delta_at(k);
        let l_k = lipschitz_at(oracle, config, delta_k)?;
        let eval = oracle.eval_at(&x, delta_k, &mut rng)?;
        let mut retries = 0;
        let (rho, alpha, x_next, gm, f_next) = loop {
            let rho = if q >= 1.0 && delta_k > 0.0 {
                rho_opt_fixed_horizon(l_k, q, delta_k, f0 - f_best, horizon)?
            } else {
                config.rho
            };
            let alpha = config.step_with_rho(k, l_k, rho);
            let (x_next, gm) = prox_step(h, &x, &eval.gradient, alpha)?;
            let f_next = oracle.value(&x_next) + h.value(&x_next);
            check_value(f_next, f0, k + 1)?;
            if f_next >= f_best {
                break (rho, alpha, x_next, gm, f_next);
            }
            retries += 1;
            if retries > MAX_DOUBLINGS {
                return Err(Error::RetryLimit {
                    iteration: k,
                    limit: MAX_DOUBLINGS,
                });
            }
            epsilon *= 2.0;
            f_best = min_f - epsilon;
        };
        states.push(AdaptiveState {
            k,
            epsilon,
            f_best,
            min_f,
            retries,
            rho,
        });
        let additive = amgm_additive(delta_k, q, rho);
        trace.push(f, f_next, linalg::norm_sq(&gm), alpha, delta_k, l_k, rho, additive, x_next.clone(), eval.gradient);
        x = x_next;
        f = f_next;
        min_f = min_f.min(f);
        // Below this, `min_f - epsilon` rounds to `min_f`.
        epsilon = (epsilon / 2.0).max(f64::EPSILON * min_f.abs().max(f64::MIN_POSITIVE));
        f_best = min_f - epsilon;
    }
    Ok(AdaptiveRun { trace, states })
}
