//! Weakly smooth objectives with a Hölder-continuous subgradient.

use rand::RngCore;

use super::{InexactOracle, OracleCertificate, OracleEval, OracleFamily};
use crate::error::{check_dim, invalid, Result};
use crate::objective::Objective;

/// Coefficient `C` in `L(δ) = C · δ^{-(1-ν)/(1+ν-q)}`.
///
/// `C = 2λ (H/(1+ν))^{1/λ} (1-λ)^{1/λ-1}` with `λ = (1+ν-q)/(2-q)`; for
/// `ν = 1` this is `H` (`0^0 = 1`).
pub fn holder_lipschitz_coefficient(holder_constant: f64, exponent: f64, degree: f64) -> Result<f64> {
    validate(holder_constant, exponent, degree)?;
    let lambda = (1.0 + exponent - degree) / (2.0 - degree);
    let a = holder_constant / (1.0 + exponent);
    let tail = if exponent == 1.0 {
        1.0
    } else {
        (1.0 - lambda).powf(1.0 / lambda - 1.0)
    };
    Ok(2.0 * lambda * a.powf(1.0 / lambda) * tail)
}

/// Smallest `L(δ)` with `(H/(1+ν)) r^{1+ν} <= (L/2) r² + δ r^q` for all `r >= 0`.
pub fn holder_smoothing_constant(holder_constant: f64, exponent: f64, degree: f64, delta: f64) -> Result<f64> {
    let c = holder_lipschitz_coefficient(holder_constant, exponent, degree)?;
    if exponent == 1.0 {
        return Ok(c);
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid("delta", format!("must be finite and > 0 when ν < 1, got {delta}")));
    }
    Ok(c * delta.powf(-(1.0 - exponent) / (1.0 + exponent - degree)))
}

fn validate(h: f64, nu: f64, q: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid("holder_constant", format!("must be finite and > 0, got {h}")));
    }
    if !(0.0..=1.0).contains(&nu) {
        return Err(invalid("exponent", format!("must lie in [0, 1], got {nu}")));
    }
    if !(q >= 0.0 && q < 1.0 + nu) {
        return Err(invalid("degree", format!("must lie in [0, 1+ν) = [0, {}), got {q}", 1.0 + nu)));
    }
    Ok(())
}

/// `F(x) = Σ_i |x_i - c_i|^{1+ν} / (1+ν)` with subgradient `sign(x_i - c_i)|x_i - c_i|^ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderFunction {
    pub exponent: f64,
    pub holder_constant: f64,
    pub centers: Vec<f64>,
}

impl HolderFunction {
    pub fn new(exponent: f64, holder_constant: f64, centers: Vec<f64>) -> Result<Self> {
        validate(holder_constant, exponent, 0.0)?;
        if centers.is_empty() {
            return Err(invalid("centers", "must be nonempty"));
        }
        Ok(Self {
            exponent,
            holder_constant,
            centers,
        })
    }

    /// A Euclidean-norm Hölder constant that always holds: `2^{1-ν} n^{(1-ν)/2}`.
    pub fn analytic_holder_bound(exponent: f64, dim: usize) -> f64 {
        2f64.powf(1.0 - exponent) * (dim as f64).powf((1.0 - exponent) / 2.0)
    }

    /// Smallest value is 0, attained at the centers.
    pub fn minimum(&self) -> f64 {
        0.0
    }
}

impl Objective for HolderFunction {
    fn dim(&self) -> usize {
        self.centers.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let p = 1.0 + self.exponent;
        x.iter().zip(&self.centers).map(|(xi, ci)| (xi - ci).abs().powf(p)).sum::<f64>() / p
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.centers)
            .map(|(xi, ci)| {
                let t = xi - ci;
                if t == 0.0 {
                    0.0
                } else {
                    t.signum() * t.abs().powf(self.exponent)
                }
            })
            .collect()
    }
}

/// Exact subgradient with the `(δ, L(δ), q)` certificate; the convex lower bound is claimed.
pub fn eval_holder(holder: &HolderFunction, x: &[f64], degree: f64, delta: f64) -> Result<OracleEval> {
    check_dim(holder.dim(), x.len())?;
    let l = holder_smoothing_constant(holder.holder_constant, holder.exponent, degree, delta)?;
    let cert = OracleCertificate::new(delta.max(0.0), l, degree)?.with_convex_lower_bound(true);
    OracleEval::new(x.to_vec(), holder.value(x), holder.gradient(x), cert)
}

/// [`eval_holder`] at a fixed degree, re-deriving `L(δ)` for every requested δ.
#[derive(Debug, Clone)]
pub struct HolderOracle {
    holder: HolderFunction,
    degree: f64,
    delta: f64,
}

impl HolderOracle {
    pub fn new(holder: HolderFunction, degree: f64, delta: f64) -> Result<Self> {
        holder_smoothing_constant(holder.holder_constant, holder.exponent, degree, delta)?;
        super::validate_degree(degree)?;
        Ok(Self { holder, degree, delta })
    }

    pub fn function(&self) -> &HolderFunction {
        &self.holder
    }
}

impl InexactOracle for HolderOracle {
    fn family(&self) -> OracleFamily {
        OracleFamily::Holder
    }
    fn dim(&self) -> usize {
        self.holder.dim()
    }
    fn degree(&self) -> f64 {
        self.degree
    }
    fn accuracy(&self) -> f64 {
        self.delta
    }
    fn lipschitz_for(&self, delta: f64) -> Result<f64> {
        holder_smoothing_constant(self.holder.holder_constant, self.holder.exponent, self.degree, delta)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.holder.value(x)
    }
    fn eval_at(&self, x: &[f64], delta: f64, _rng: &mut dyn RngCore) -> Result<OracleEval> {
        eval_holder(&self.holder, x, self.degree, delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::pow_zero_one;
    use proptest::prelude::*;

    fn grid_holds(h: f64, nu: f64, q: f64, delta: f64, l: f64) -> bool {
        (1..=100_000).all(|i| {
            let r = i as f64 * 1e-3;
            h / (1.0 + nu) * r.powf(1.0 + nu) <= 0.5 * l * r * r + delta * pow_zero_one(r, q) + 1e-12
        })
    }

    #[test]
    fn smooth_case_returns_h() {
        for q in [0.0, 0.5, 1.0, 1.7] {
            for d in [1e-3, 1.0, 7.0] {
                assert!((holder_smoothing_constant(3.0, 1.0, q, d).unwrap() - 3.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bounded_variation_case() {
        // ν = 0, q = 0: H r <= (L/2) r² + δ is tight at L = H²/(2δ).
        let l = holder_smoothing_constant(2.0, 0.0, 0.0, 0.5).unwrap();
        assert!((l - 4.0).abs() < 1e-12);
        assert!(grid_holds(2.0, 0.0, 0.0, 0.5, l));
        assert!(!grid_holds(2.0, 0.0, 0.0, 0.5, 0.99 * l));
    }

    #[test]
    fn half_half_case() {
        let l = holder_smoothing_constant(1.0, 0.5, 0.5, 0.1).unwrap();
        assert!(grid_holds(1.0, 0.5, 0.5, 0.1, l));
        assert!(!grid_holds(1.0, 0.5, 0.5, 0.1, 0.99 * l));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(holder_smoothing_constant(1.0, 0.5, 1.5, 0.1).is_err());
        assert!(holder_smoothing_constant(1.0, 0.5, 0.5, 0.0).is_err());
        assert!(holder_smoothing_constant(1.0, 1.0, 0.5, 0.0).is_ok());
        assert!(holder_smoothing_constant(0.0, 0.5, 0.5, 0.1).is_err());
    }

    #[test]
    fn power_function_gradient() {
        let f = HolderFunction::new(0.5, 1.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(f.gradient(&[1.0, -1.0]), vec![1.0, -1.0]);
        let g = HolderFunction::new(0.5, 1.0, vec![0.0]).unwrap();
        assert!((g.value(&[4.0]) - 8.0 / 1.5).abs() < 1e-12);
        assert!((g.gradient(&[4.0])[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eval_claims_convexity() {
        let f = HolderFunction::new(0.5, 1.0, vec![0.3]).unwrap();
        let e = eval_holder(&f, &[1.0], 0.75, 0.2).unwrap();
        assert!(e.certificate.convex_lower_bound);
        assert_eq!(e.certificate.degree, 0.75);
    }

    proptest! {
        #[test]
        fn halving_delta_never_lowers_l(h in 0.1f64..10.0, nu in 0.0f64..0.99, qf in 0.0f64..0.99, d in 1e-4f64..10.0) {
            let q = qf * (1.0 + nu);
            let a = holder_smoothing_constant(h, nu, q, d).unwrap();
            let b = holder_smoothing_constant(h, nu, q, d / 2.0).unwrap();
            prop_assert!(b >= a);
        }

        #[test]
        fn smoothing_inequality_holds(h in 0.1f64..10.0, nu in 0.0f64..=1.0, qf in 0.0f64..0.99, d in 1e-3f64..10.0, r in 0.0f64..100.0) {
            let q = qf * (1.0 + nu).min(1.999);
            let l = holder_smoothing_constant(h, nu, q, d).unwrap();
            let lhs = h / (1.0 + nu) * r.powf(1.0 + nu);
            let rhs = 0.5 * l * r * r + d * pow_zero_one(r, q);
            prop_assert!(lhs <= rhs * (1.0 + 1e-10) + 1e-12);
        }
    }
}
