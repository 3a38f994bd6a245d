//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::DEFAULT_NOISE_LEVEL;
use crate::solver::ThetaRule;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub master_seed: u64,
    pub problem: ProblemSpec,
    pub oracle: OracleSpec,
    pub solver: SolverSpec,
    pub output: OutputSpec,
    #[serde(default = "one_usize")]
    pub repeats: usize,
    /// 0 runs plain I-PGM; `m > 0` keeps the worst of `m` oracle draws per step.
    #[serde(default)]
    pub worst_case_directions: usize,
    /// Fraction of final iterations averaged into the plateau estimate.
    #[serde(default = "default_plateau_fraction")]
    pub plateau_fraction: f64,
    #[serde(default)]
    pub certify: CertifySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `Σ log(1 + (⟨a_i, x⟩ - b_i)²)` over the ℓ1 ball of radius `R`.
    LogSum {
        n: usize,
        #[serde(rename = "N")]
        big_n: usize,
        #[serde(rename = "R")]
        radius: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_noise_level")]
        noise_level: f64,
    },
    /// `½‖Mx - d‖²` on all of `R^n`.
    Quadratic {
        n: usize,
        conditioning: f64,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Exact,
    NoisyGradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub family: OracleKind,
    /// Gradient noise norms `Δ`; one grid column each. Ignored for `exact`.
    #[serde(default)]
    pub noise_bounds: Vec<f64>,
    /// Degrees `q`; one grid row each.
    pub degrees: Vec<f64>,
    /// Multiplies the claimed δ; values below 1 understate it.
    #[serde(default = "one_f64")]
    pub claim_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ipgm,
    IpgmAdaptive,
    Fipgm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub algorithm: Algorithm,
    pub iterations: usize,
    #[serde(default = "default_step_scale")]
    pub step_scale: f64,
    /// Defaults to the problem's Lipschitz constant.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub theta_rule: ThetaRule,
    #[serde(default = "one_f64")]
    pub epsilon0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySpec {
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Default for CertifySpec {
    fn default() -> Self {
        Self {
            pairs: default_pairs(),
            tolerance: default_tolerance(),
        }
    }
}

fn one_usize() -> usize {
    1
}
fn one_f64() -> f64 {
    1.0
}
fn default_plateau_fraction() -> f64 {
    0.1
}
fn default_noise_level() -> f64 {
    DEFAULT_NOISE_LEVEL
}
fn default_step_scale() -> f64 {
    0.5
}
fn default_pairs() -> usize {
    1000
}
fn default_tolerance() -> f64 {
    1e-7
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The grid values of `Δ`; a single 0 for exact oracles.
    pub fn noise_grid(&self) -> Vec<f64> {
        match self.oracle.family {
            OracleKind::Exact => vec![0.0],
            OracleKind::NoisyGradient => self.oracle.noise_bounds.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(bad(format!("unsupported version {}, expected {CONFIG_VERSION}", self.version)));
        }
        match self.problem {
            ProblemSpec::LogSum {
                n,
                big_n,
                radius,
                noise_level,
                ..
            } => {
                if n == 0 || big_n == 0 {
                    return Err(bad("problem dimensions must be positive"));
                }
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(bad("problem radius must be finite and > 0"));
                }
                if !(noise_level >= 0.0) || !noise_level.is_finite() {
                    return Err(bad("problem noise_level must be finite and >= 0"));
                }
            }
            ProblemSpec::Quadratic { n, conditioning, .. } => {
                if n == 0 {
                    return Err(bad("problem dimension must be positive"));
                }
                if !(conditioning >= 1.0) || !conditioning.is_finite() {
                    return Err(bad("conditioning must be finite and >= 1"));
                }
            }
        }
        let o = &self.oracle;
        if o.degrees.is_empty() {
            return Err(bad("oracle.degrees is empty"));
        }
        if let Some(q) = o.degrees.iter().find(|q| !(0.0..2.0).contains(*q)) {
            return Err(bad(format!("degree {q} outside [0, 2)")));
        }
        if !(o.claim_scale > 0.0) || !o.claim_scale.is_finite() {
            return Err(bad("oracle.claim_scale must be finite and > 0"));
        }
        if o.family == OracleKind::NoisyGradient {
            if o.noise_bounds.is_empty() {
                return Err(bad("oracle.noise_bounds is empty"));
            }
            if let Some(d) = o.noise_bounds.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
                return Err(bad(format!("noise bound {d} must be finite and >= 0")));
            }
            let bounded = matches!(self.problem, ProblemSpec::LogSum { .. });
            for &q in &o.degrees {
                if q > 1.0 {
                    return Err(bad(format!("noisy-gradient oracle needs q <= 1, got {q}")));
                }
                if !bounded && q != 1.0 {
                    return Err(bad(format!("q = {q} < 1 needs a bounded domain; the quadratic family is unconstrained")));
                }
            }
        }
        let s = &self.solver;
        if s.iterations == 0 {
            return Err(bad("solver.iterations must be positive"));
        }
        if !(s.step_scale > 0.0 && s.step_scale <= 1.0) {
            return Err(bad("solver.step_scale must lie in (0, 1]"));
        }
        if let Some(rho) = s.rho {
            if !(rho > 0.0) || !rho.is_finite() {
                return Err(bad("solver.rho must be finite and > 0"));
            }
        }
        if !(0.0..1.0).contains(&s.beta) || !(0.0..1.0).contains(&s.zeta) {
            return Err(bad("solver.beta and solver.zeta must lie in [0, 1)"));
        }
        if !(s.epsilon0 > 0.0) || !s.epsilon0.is_finite() {
            return Err(bad("solver.epsilon0 must be finite and > 0"));
        }
        if self.repeats == 0 {
            return Err(bad("repeats must be positive"));
        }
        if self.worst_case_directions > 0 && (o.family != OracleKind::NoisyGradient || s.algorithm != Algorithm::Ipgm) {
            return Err(bad("worst-case mode needs the noisy_gradient oracle and the ipgm algorithm"));
        }
        if !(self.plateau_fraction > 0.0 && self.plateau_fraction <= 1.0) {
            return Err(bad("plateau_fraction must lie in (0, 1]"));
        }
        if self.certify.pairs == 0 || !(self.certify.tolerance >= 0.0) {
            return Err(bad("certify.pairs must be positive and certify.tolerance >= 0"));
        }
        Ok(())
    }
}
