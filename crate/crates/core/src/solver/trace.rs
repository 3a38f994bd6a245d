//! Per-iteration records of a solver run.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::oracle::OracleFamily;

/// Columns written by [`RunTrace::to_csv`] without a bound column.
pub const TRACE_CSV_HEADER: &str = "k,f,gm_sq,min_gm_sq,alpha,delta_k";

/// One step `x_k -> x_{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `f(x_k)`
    pub f: f64,
    /// `f(x_{k+1})`
    pub f_next: f64,
    /// `‖g_k + p_{k+1}‖²`
    pub gm_sq: f64,
    /// `min_{j<=k} ‖g_j + p_{j+1}‖²`
    pub min_gm_sq: f64,
    pub alpha: f64,
    pub delta_k: f64,
    /// Certificate constant `L_k` used for the step.
    pub lipschitz_k: f64,
    pub rho_k: f64,
    /// `(2-q) δ_k^{2/(2-q)} / (2 ρ^{q/(2-q)})`
    pub additive: f64,
    /// `Σ_{j<=k} α_j ‖g_j + p_{j+1}‖²`
    pub weighted_gm_sum: f64,
    /// `Σ_{j<=k} additive_j`
    pub additive_sum: f64,
}

/// Extra state of the fast method at iteration `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FastRecord {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub theta: f64,
    /// `A_k = Σ_{i<=k} θ_i / L_i`
    pub a: f64,
    pub tau: f64,
    /// `f(y_k)`
    pub f_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    pub algorithm: &'static str,
    pub oracle_family: OracleFamily,
    pub degree: f64,
    /// Set when each step kept the worst of several oracle draws.
    pub adversarial: bool,
    pub records: Vec<IterationRecord>,
    /// `x_0, …, x_K`
    pub iterates: Vec<Vec<f64>>,
    /// `g_0, …, g_{K-1}`
    pub gradients: Vec<Vec<f64>>,
    /// Empty except for the fast method.
    pub fast: Vec<FastRecord>,
}

impl RunTrace {
    pub(crate) fn new(algorithm: &'static str, oracle_family: OracleFamily, degree: f64, x0: Vec<f64>) -> Self {
        Self {
            algorithm,
            oracle_family,
            degree,
            adversarial: false,
            records: Vec::new(),
            iterates: vec![x0],
            gradients: Vec::new(),
            fast: Vec::new(),
        }
    }

    /// Number of completed iterations.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn initial_value(&self) -> Option<f64> {
        self.records.first().map(|r| r.f)
    }

    pub fn last_iterate(&self) -> &[f64] {
        self.iterates.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn min_gm_sq(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.min_gm_sq).collect()
    }

    /// Appends a record, filling the running minimum and cumulative sums.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn push(
        &mut self,
        f: f64,
        f_next: f64,
        gm_sq: f64,
        alpha: f64,
        delta_k: f64,
        lipschitz_k: f64,
        rho_k: f64,
        additive: f64,
        x_next: Vec<f64>,
        gradient: Vec<f64>,
    ) {
        let prev = self.records.last();
        let min_gm_sq = prev.map_or(gm_sq, |p| p.min_gm_sq.min(gm_sq));
        let weighted_gm_sum = prev.map_or(0.0, |p| p.weighted_gm_sum) + alpha * gm_sq;
        let additive_sum = prev.map_or(0.0, |p| p.additive_sum) + additive;
        self.records.push(IterationRecord {
            k: self.records.len(),
            f,
            f_next,
            gm_sq,
            min_gm_sq,
            alpha,
            delta_k,
            lipschitz_k,
            rho_k,
            additive,
            weighted_gm_sum,
            additive_sum,
        });
        self.iterates.push(x_next);
        self.gradients.push(gradient);
    }

    /// CSV with columns `k,f,gm_sq,min_gm_sq,alpha,delta_k`, plus `bound`
    /// when per-iteration bounds are given.
    pub fn to_csv(&self, bounds: Option<&[f64]>) -> String {
        let mut s = String::from(TRACE_CSV_HEADER);
        if bounds.is_some() {
            s.push_str(",bound");
        }
        s.push('\n');
        for (i, r) in self.records.iter().enumerate() {
            let _ = write!(s, "{},{:e},{:e},{:e},{:e},{:e}", r.k, r.f, r.gm_sq, r.min_gm_sq, r.alpha, r.delta_k);
            if let Some(b) = bounds {
                match b.get(i) {
                    Some(v) => {
                        let _ = write!(s, ",{v:e}");
                    }
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Uniform average of `x_1, …, x_{k+1}`.
pub fn ergodic_average(trace: &RunTrace, k: usize) -> Result<Vec<f64>> {
    if k >= trace.len() {
        return Err(Error::OutOfRange {
            requested: k,
            available: trace.len(),
        });
    }
    let n = trace.iterates[0].len();
    let mut avg = vec![0.0; n];
    for x in &trace.iterates[1..=k + 1] {
        linalg::axpy(1.0, x, &mut avg);
    }
    let c = 1.0 / (k + 1) as f64;
    Ok(avg.into_iter().map(|v| v * c).collect())
}

/// Constants for [`stationarity_gap`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapParams {
    /// `‖g_k + p_{k+1}‖ + L_F ‖x_{k+1} - x_k‖ + Δ`
    NoisyGradient { lipschitz: f64, noise_bound: f64 },
    /// `‖g_k + p_{k+1}‖ + H_ν ‖x_{k+1} - x_k‖^ν`
    Holder { holder_constant: f64, exponent: f64 },
}

/// Upper bound on `dist(0, ∂f(x_{k+1}))` for every recorded iteration.
pub fn stationarity_gap(trace: &RunTrace, params: GapParams) -> Result<Vec<f64>> {
    let ok = match params {
        GapParams::NoisyGradient { .. } => matches!(trace.oracle_family, OracleFamily::NoisyGradient | OracleFamily::Exact),
        GapParams::Holder { .. } => trace.oracle_family == OracleFamily::Holder,
    };
    if !ok {
        let expected = match params {
            GapParams::NoisyGradient { .. } => OracleFamily::NoisyGradient,
            GapParams::Holder { .. } => OracleFamily::Holder,
        };
        return Err(Error::OracleMismatch {
            expected: expected.to_string(),
            found: trace.oracle_family.to_string(),
        });
    }
    Ok(trace
        .records
        .iter()
        .map(|r| {
            let step = linalg::dist(&trace.iterates[r.k + 1], &trace.iterates[r.k]);
            let gm = r.gm_sq.sqrt();
            match params {
                GapParams::NoisyGradient { lipschitz, noise_bound } => gm + lipschitz * step + noise_bound,
                GapParams::Holder { holder_constant, exponent } => gm + holder_constant * step.powf(exponent),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_with(points: &[f64]) -> RunTrace {
        let mut t = RunTrace::new("ipgm", OracleFamily::Exact, 1.0, vec![points[0]]);
        for w in points.windows(2) {
            let gm = (w[0] - w[1]) / 0.5;
            t.push(0.0, 0.0, gm * gm, 0.5, 0.0, 1.0, 1.0, 0.0, vec![w[1]], vec![gm]);
        }
        t
    }

    #[test]
    fn ergodic_examples() {
        let t = trace_with(&[5.0, 0.0, 2.0]);
        assert_eq!(ergodic_average(&t, 0).unwrap(), vec![0.0]);
        assert_eq!(ergodic_average(&t, 1).unwrap(), vec![1.0]);
        assert!(matches!(ergodic_average(&t, 2), Err(Error::OutOfRange { .. })));
        let c = trace_with(&[3.0, 3.0, 3.0, 3.0]);
        assert_eq!(ergodic_average(&c, 2).unwrap(), vec![3.0]);
    }

    #[test]
    fn running_minimum_and_sums() {
        let t = trace_with(&[4.0, 2.0, 1.5, 0.0]);
        let m = t.min_gm_sq();
        assert!(m.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(t.records[2].min_gm_sq, 1.0);
        assert_eq!(t.records[2].weighted_gm_sum, 0.5 * (16.0 + 1.0 + 9.0));
    }

    #[test]
    fn gap_at_fixed_point_is_zero() {
        let t = trace_with(&[1.0, 1.0]);
        let g = stationarity_gap(&t, GapParams::NoisyGradient { lipschitz: 3.0, noise_bound: 0.0 }).unwrap();
        assert_eq!(g, vec![0.0]);
        assert!(matches!(
            stationarity_gap(&t, GapParams::Holder { holder_constant: 1.0, exponent: 0.5 }),
            Err(Error::OracleMismatch { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let t = trace_with(&[1.0, 0.5]);
        let plain = t.to_csv(None);
        assert!(plain.starts_with("k,f,gm_sq,min_gm_sq,alpha,delta_k\n0,"));
        let with = t.to_csv(Some(&[2.0]));
        assert!(with.starts_with("k,f,gm_sq,min_gm_sq,alpha,delta_k,bound\n"));
        assert!(with.trim_end().ends_with(",2e0"));
    }
}
