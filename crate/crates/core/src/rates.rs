//! Closed-form convergence bounds and optimal parameter choices.
//!
//! Horizons `k` are real so curves can be sampled smoothly; integer
//! semantics are up to the caller.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::oracle::{amgm_additive, holder_lipschitz_coefficient, validate_degree};

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn nonneg(name: &'static str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(name, format!("must be finite and >= 0, got {v}")))
    }
}

fn unit_interval(name: &'static str, v: f64) -> Result<f64> {
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(invalid(name, format!("must lie in [0, 1), got {v}")))
    }
}

/// Nonconvex I-PGM with decaying schedules:
///
/// `2(L+qρ)Δ0/((1-ζ)(k+1)^{1-ζ}) + (2-q)(L+qρ)δ^{2/(2-q)}/((1-ζ)(1-β)ρ^{q/(2-q)}(k+1)^{β-ζ})`
#[allow(clippy::too_many_arguments)]
pub fn bound_thm2(l: f64, rho: f64, q: f64, delta: f64, beta: f64, zeta: f64, delta0_gap: f64, k: f64) -> Result<f64> {
    positive("L", l)?;
    positive("rho", rho)?;
    validate_degree(q)?;
    nonneg("delta", delta)?;
    unit_interval("beta", beta)?;
    unit_interval("zeta", zeta)?;
    nonneg("delta0_gap", delta0_gap)?;
    nonneg("k", k)?;
    let lt = l + q * rho;
    let u = k + 1.0;
    let first = 2.0 * lt * delta0_gap / ((1.0 - zeta) * u.powf(1.0 - zeta));
    let second = 2.0 * lt * amgm_additive(delta, q, rho) / ((1.0 - zeta) * (1.0 - beta) * u.powf(beta - zeta));
    Ok(first + second)
}

/// Constant schedules with `ρ = L`: `2(q+1)LΔ0/(k+1) + (q+1)(2-q)L^{(2-2q)/(2-q)}δ^{2/(2-q)}`.
pub fn bound_cor1_const(l: f64, q: f64, delta: f64, delta0_gap: f64, k: f64) -> Result<f64> {
    positive("L", l)?;
    validate_degree(q)?;
    nonneg("delta", delta)?;
    nonneg("delta0_gap", delta0_gap)?;
    nonneg("k", k)?;
    Ok(2.0 * (q + 1.0) * l * delta0_gap / (k + 1.0) + 2.0 * (q + 1.0) * l * amgm_additive(delta, q, l))
}

/// `k → ∞` limit of [`bound_cor1_const`].
pub fn cor1_plateau(l: f64, q: f64, delta: f64) -> Result<f64> {
    bound_cor1_const(l, q, delta, 0.0, 0.0)
}

fn check_fixed_horizon(l: f64, q: f64, delta: f64, delta0_gap: f64, k: f64) -> Result<()> {
    positive("L", l)?;
    validate_degree(q)?;
    if q < 1.0 {
        return Err(invalid("degree", format!("fixed-horizon choice needs q in [1, 2), got {q}")));
    }
    positive("delta", delta)?;
    positive("delta0_gap", delta0_gap)?;
    nonneg("k", k)?;
    Ok(())
}

/// `ρ = L^{(2-q)/2} δ (k+1)^{(2-q)/2} / (2Δ0)^{(2-q)/2}` for a fixed horizon `k`.
pub fn rho_opt_fixed_horizon(l: f64, q: f64, delta: f64, delta0_gap: f64, k: f64) -> Result<f64> {
    check_fixed_horizon(l, q, delta, delta0_gap, k)?;
    let e = (2.0 - q) / 2.0;
    Ok(delta * (l * (k + 1.0) / (2.0 * delta0_gap)).powf(e))
}

/// [`bound_thm2`] (`β = ζ = 0`) evaluated at [`rho_opt_fixed_horizon`], in expanded form.
pub fn bound_cor1_fixed_horizon(l: f64, q: f64, delta: f64, delta0_gap: f64, k: f64) -> Result<f64> {
    check_fixed_horizon(l, q, delta, delta0_gap, k)?;
    let u = k + 1.0;
    let g = 2.0 * delta0_gap;
    let middle = (q * l.powf(1.0 - q / 2.0) * g.powf(q / 2.0) * delta
        + (2.0 - q) * delta * l.powf(1.0 - q / 2.0) * g.powf(q / 2.0))
        / u.powf(q / 2.0);
    let last = q * (2.0 - q) * delta * delta * l.powf(1.0 - q) * g.powf(q - 1.0) / u.powf(q - 1.0);
    Ok(2.0 * l * delta0_gap / u + middle + last)
}

/// `ρ = δ k^{(2-q)/2} / R^{2-q}`
pub fn rho_opt_convex(q: f64, delta: f64, radius: f64, k: f64) -> Result<f64> {
    validate_degree(q)?;
    positive("R", radius)?;
    positive("k", k)?;
    Ok(nonneg("delta", delta)? * k.powf((2.0 - q) / 2.0) / radius.powf(2.0 - q))
}

/// Convex I-PGM, ergodic average. With `rho = None` the optimal-ρ form
/// `LR²/(2k) + δ(2+q)R^q/(2k^{q/2})` is returned.
pub fn bound_convex_ipgm(l: f64, q: f64, delta: f64, radius: f64, k: f64, rho: Option<f64>) -> Result<f64> {
    positive("L", l)?;
    validate_degree(q)?;
    nonneg("delta", delta)?;
    positive("R", radius)?;
    if !(k >= 1.0) {
        return Err(invalid("k", format!("must be >= 1, got {k}")));
    }
    let r2 = radius * radius;
    Ok(match rho {
        Some(rho) => {
            positive("rho", rho)?;
            (l + q * rho) * r2 / (2.0 * k) + amgm_additive(delta, q, rho)
        }
        None => l * r2 / (2.0 * k) + delta * (2.0 + q) * radius.powf(q) / (2.0 * k.powf(q / 2.0)),
    })
}

/// `ρ* = ((k+1)(k+2)(k+3))^{(2-q)/2} δ / (8R²)^{(2-q)/2}`
pub fn rho_star_fipgm(q: f64, delta: f64, radius: f64, k: f64) -> Result<f64> {
    validate_degree(q)?;
    positive("R", radius)?;
    nonneg("k", k)?;
    let p = (k + 1.0) * (k + 2.0) * (k + 3.0);
    Ok(nonneg("delta", delta)? * (p / (8.0 * radius * radius)).powf((2.0 - q) / 2.0))
}

/// FI-PGM on `f(y_k) - f*`. With `rho = None` the ρ* form
/// `4LR²/((k+1)(k+2)) + 8^{q/2}R^q(k+3)δ/((k+1)(k+2)(k+3))^{q/2}` is returned.
pub fn bound_fipgm(l: f64, q: f64, delta: f64, radius: f64, k: f64, rho: Option<f64>) -> Result<f64> {
    positive("L", l)?;
    validate_degree(q)?;
    nonneg("delta", delta)?;
    positive("R", radius)?;
    nonneg("k", k)?;
    let r2 = radius * radius;
    let d = (k + 1.0) * (k + 2.0);
    Ok(match rho {
        Some(rho) => {
            positive("rho", rho)?;
            4.0 * (l + q * rho) * r2 / d + (k + 3.0) * amgm_additive(delta, q, rho)
        }
        None => {
            let p = d * (k + 3.0);
            4.0 * l * r2 / d + 8f64.powf(q / 2.0) * radius.powf(q) * (k + 3.0) * delta / p.powf(q / 2.0)
        }
    })
}

/// Large-`k` exponent of the δ-term of the ρ* form of [`bound_fipgm`]: `1 - 3q/2`.
pub fn fipgm_delta_exponent(q: f64) -> f64 {
    1.0 - 1.5 * q
}

/// Per-horizon accuracy for Hölder-smooth problems and the resulting bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderChoice {
    pub delta: f64,
    pub bound: f64,
    /// `C_1 = 2(q+1)Δ0 C`
    pub c1: f64,
    /// `C_2 = (q+1)(2-q) C^{(2-2q)/(2-q)}`
    pub c2: f64,
}

/// Minimizes `C_1 δ^{-a}/(k+1) + C_2 δ^b` over δ, with `a = (1-ν)/(1+ν-q)`,
/// `b = 2ν/(1+ν-q)` and `L(δ) = C δ^{-a}`.
pub fn holder_delta_opt(holder_constant: f64, nu: f64, q: f64, delta0_gap: f64, k: f64) -> Result<HolderChoice> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(invalid("nu", format!("must lie in (0, 1], got {nu}")));
    }
    validate_degree(q)?;
    let c = holder_lipschitz_coefficient(holder_constant, nu, q)?;
    nonneg("delta0_gap", delta0_gap)?;
    nonneg("k", k)?;
    let u = k + 1.0;
    let c1 = 2.0 * (q + 1.0) * delta0_gap * c;
    let c2 = (q + 1.0) * (2.0 - q) * c.powf((2.0 - 2.0 * q) / (2.0 - q));
    if nu == 1.0 {
        return Ok(HolderChoice {
            delta: 0.0,
            bound: c1 / u,
            c1,
            c2,
        });
    }
    let a = (1.0 - nu) / (1.0 + nu - q);
    let b = 2.0 * nu / (1.0 + nu - q);
    let delta = (a * c1 / (b * c2 * u)).powf((1.0 + nu - q) / (1.0 + nu));
    let bound = c1 * delta.powf(-a) / u + c2 * delta.powf(b);
    Ok(HolderChoice { delta, bound, c1, c2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Thm2Nonconvex,
    Cor1Const,
    Cor1FixedHorizon,
    ConvexIpgm,
    ConvexIpgmOptRho,
    Fipgm,
    FipgmOptRho,
    HolderRate,
}

impl CurveKind {
    pub const ALL: [CurveKind; 8] = [
        Self::Thm2Nonconvex,
        Self::Cor1Const,
        Self::Cor1FixedHorizon,
        Self::ConvexIpgm,
        Self::ConvexIpgmOptRho,
        Self::Fipgm,
        Self::FipgmOptRho,
        Self::HolderRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thm2Nonconvex => "thm2_nonconvex",
            Self::Cor1Const => "cor1_const",
            Self::Cor1FixedHorizon => "cor1_fixed_horizon",
            Self::ConvexIpgm => "convex_ipgm",
            Self::ConvexIpgmOptRho => "convex_ipgm_opt_rho",
            Self::Fipgm => "fipgm",
            Self::FipgmOptRho => "fipgm_opt_rho",
            Self::HolderRate => "holder_rate",
        }
    }
}

impl std::str::FromStr for CurveKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid("kind", format!("unknown curve kind `{s}`")))
    }
}

impl std::fmt::Display for CurveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Named parameters for a curve; unused ones may be left empty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveParams {
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub rho: Option<f64>,
    pub q: Option<f64>,
    pub delta: Option<f64>,
    pub delta0_gap: Option<f64>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub beta: Option<f64>,
    pub zeta: Option<f64>,
    pub holder_constant: Option<f64>,
    pub nu: Option<f64>,
    /// Fixes ρ at this horizon for `cor1_fixed_horizon` instead of re-optimizing per `k`.
    pub horizon: Option<f64>,
}

impl CurveParams {
    fn get(v: Option<f64>, name: &'static str) -> Result<f64> {
        v.ok_or_else(|| invalid(name, "required by this curve kind"))
    }

    fn named(&self) -> BTreeMap<String, f64> {
        let pairs = [
            ("L", self.l),
            ("rho", self.rho),
            ("q", self.q),
            ("delta", self.delta),
            ("delta0_gap", self.delta0_gap),
            ("R", self.radius),
            ("beta", self.beta),
            ("zeta", self.zeta),
            ("holder_constant", self.holder_constant),
            ("nu", self.nu),
            ("horizon", self.horizon),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

/// Evaluates one curve at horizon `k`.
pub fn evaluate_curve(kind: CurveKind, p: &CurveParams, k: f64) -> Result<f64> {
    use CurveParams as P;
    let q = P::get(p.q, "q")?;
    let delta = p.delta.unwrap_or(0.0);
    match kind {
        CurveKind::Thm2Nonconvex => bound_thm2(
            P::get(p.l, "L")?,
            P::get(p.rho, "rho")?,
            q,
            delta,
            p.beta.unwrap_or(0.0),
            p.zeta.unwrap_or(0.0),
            P::get(p.delta0_gap, "delta0_gap")?,
            k,
        ),
        CurveKind::Cor1Const => bound_cor1_const(P::get(p.l, "L")?, q, delta, P::get(p.delta0_gap, "delta0_gap")?, k),
        CurveKind::Cor1FixedHorizon => {
            let (l, d0) = (P::get(p.l, "L")?, P::get(p.delta0_gap, "delta0_gap")?);
            match p.horizon {
                Some(h) => {
                    let rho = rho_opt_fixed_horizon(l, q, delta, d0, h)?;
                    bound_thm2(l, rho, q, delta, 0.0, 0.0, d0, k)
                }
                None => bound_cor1_fixed_horizon(l, q, delta, d0, k),
            }
        }
        CurveKind::ConvexIpgm => bound_convex_ipgm(P::get(p.l, "L")?, q, delta, P::get(p.radius, "R")?, k, Some(P::get(p.rho, "rho")?)),
        CurveKind::ConvexIpgmOptRho => bound_convex_ipgm(P::get(p.l, "L")?, q, delta, P::get(p.radius, "R")?, k, None),
        CurveKind::Fipgm => bound_fipgm(P::get(p.l, "L")?, q, delta, P::get(p.radius, "R")?, k, Some(P::get(p.rho, "rho")?)),
        CurveKind::FipgmOptRho => bound_fipgm(P::get(p.l, "L")?, q, delta, P::get(p.radius, "R")?, k, None),
        CurveKind::HolderRate => Ok(holder_delta_opt(
            P::get(p.holder_constant, "holder_constant")?,
            P::get(p.nu, "nu")?,
            q,
            P::get(p.delta0_gap, "delta0_gap")?,
            k,
        )?
        .bound),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCurve {
    pub kind: CurveKind,
    pub parameters: BTreeMap<String, f64>,
    pub samples: Vec<(f64, f64)>,
}

impl BoundCurve {
    pub fn sample(kind: CurveKind, params: &CurveParams, ks: &[f64]) -> Result<Self> {
        let samples = ks
            .iter()
            .map(|&k| evaluate_curve(kind, params, k).map(|b| (k, b)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind,
            parameters: params.named(),
            samples,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,bound\n");
        for (k, b) in &self.samples {
            let _ = writeln!(s, "{k},{b:e}");
        }
        s
    }
}

/// `count` points log-spaced over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
