//! Robust least squares `F(x) = Σ log((a_iᵀx - b_i)² + 1)` over an ℓ1 ball.

use std::fmt::Write as _;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{self, Matrix};
use crate::objective::{Objective, SmoothObjective};
use crate::random::{seeded, standard_normal_vec, uniform_l1_ball};

/// Relative noise level: the noise standard deviation is `level · ‖A x_true‖ / √N`.
pub const DEFAULT_NOISE_LEVEL: f64 = 0.01;

const FORMAT_TAG: &str = "logsum-v1";

#[derive(Debug, Clone, PartialEq)]
pub struct LogSumProblem {
    /// `N × n`, row `i` is `a_i`.
    rows: Matrix,
    targets: Vec<f64>,
    radius: f64,
    lipschitz: f64,
    x_true: Option<Vec<f64>>,
}

impl LogSumProblem {
    /// Builds an instance from explicit data; `L_F = Σ ‖a_i‖²`.
    pub fn new(rows: Matrix, targets: Vec<f64>, radius: f64, x_true: Option<Vec<f64>>) -> Result<Self> {
        check_dim(rows.rows(), targets.len())?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("must be finite and > 0, got {radius}")));
        }
        if let Some(x) = &x_true {
            check_dim(rows.cols(), x.len())?;
        }
        let lipschitz = rows.frobenius_sq();
        if !(lipschitz > 0.0) {
            return Err(invalid("rows", "all vectors a_i are zero"));
        }
        Ok(Self {
            rows,
            targets,
            radius,
            lipschitz,
            x_true,
        })
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }
    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn x_true(&self) -> Option<&[f64]> {
        self.x_true.as_deref()
    }
    /// Number of terms `N`.
    pub fn len(&self) -> usize {
        self.targets.len()
    }
    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Value and gradient in one pass.
    pub fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.rows.cols(), x.len())?;
        let r = self.residuals(x);
        let value = r.iter().map(|ri| (ri * ri).ln_1p()).sum();
        let w: Vec<f64> = r.iter().map(|ri| 2.0 * ri / (ri * ri + 1.0)).collect();
        Ok((value, self.rows.tr_mul_vec(&w)))
    }

    fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.rows.mul_vec(x);
        for (ri, bi) in r.iter_mut().zip(&self.targets) {
            *ri -= bi;
        }
        r
    }

    /// Text serialization: a tag line, `n N`, `R`, `N` rows of `a_i`, a row of `b`,
    /// then `x_true` or `none`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{FORMAT_TAG}");
        let _ = writeln!(s, "{} {}", self.rows.cols(), self.rows.rows());
        let _ = writeln!(s, "{:e}", self.radius);
        for i in 0..self.rows.rows() {
            let _ = writeln!(s, "{}", join(self.rows.row(i)));
        }
        let _ = writeln!(s, "{}", join(&self.targets));
        match &self.x_true {
            Some(x) => {
                let _ = writeln!(s, "{}", join(x));
            }
            None => s.push_str("none\n"),
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("missing {what}")));
        if next("header")? != FORMAT_TAG {
            return Err(Error::Parse(format!("expected `{FORMAT_TAG}` header")));
        }
        let dims = parse_values::<usize>(next("dimensions")?)?;
        let [n, big_n] = dims[..] else {
            return Err(Error::Parse("dimension line must hold `n N`".into()));
        };
        let radius = single(parse_values::<f64>(next("radius")?)?)?;
        let mut data = Vec::with_capacity(n * big_n);
        for i in 0..big_n {
            let row = parse_values::<f64>(next("row")?)?;
            if row.len() != n {
                return Err(Error::Parse(format!("row {i} has {} values, expected {n}", row.len())));
            }
            data.extend(row);
        }
        let targets = parse_values::<f64>(next("targets")?)?;
        if targets.len() != big_n {
            return Err(Error::Parse(format!("expected {big_n} targets, got {}", targets.len())));
        }
        let truth = next("x_true")?;
        let x_true = if truth == "none" { None } else { Some(parse_values::<f64>(truth)?) };
        Self::new(Matrix::from_row_major(big_n, n, data)?, targets, radius, x_true)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_values<T: std::str::FromStr>(line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| Error::Parse(format!("bad number `{t}`"))))
        .collect()
}

fn single(v: Vec<f64>) -> Result<f64> {
    match v[..] {
        [x] => Ok(x),
        _ => Err(Error::Parse("expected a single value".into())),
    }
}

impl Objective for LogSumProblem {
    fn dim(&self) -> usize {
        self.rows.cols()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.residuals(x).iter().map(|ri| (ri * ri).ln_1p()).sum()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = self.residuals(x).iter().map(|ri| 2.0 * ri / (ri * ri + 1.0)).collect();
        self.rows.tr_mul_vec(&w)
    }
}

impl SmoothObjective for LogSumProblem {
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Random instance: `a_i ~ N(0, I/n)`, `x_true` uniform in the ℓ1 ball,
/// `b = A x_true + noise` with relative level `noise_level`.
pub fn generate_logsum_instance(n: usize, big_n: usize, radius: f64, noise_level: f64, seed: u64) -> Result<LogSumProblem> {
    if n == 0 || big_n == 0 {
        return Err(invalid("dimensions", format!("n and N must be >= 1, got n = {n}, N = {big_n}")));
    }
    if !(noise_level >= 0.0) || !noise_level.is_finite() {
        return Err(invalid("noise_level", format!("must be finite and >= 0, got {noise_level}")));
    }
    if !(radius > 0.0) {
        return Err(invalid("radius", format!("must be > 0, got {radius}")));
    }
    let mut rng = seeded(seed);
    let s = 1.0 / (n as f64).sqrt();
    let data: Vec<f64> = standard_normal_vec(&mut rng, n * big_n).iter().map(|v| s * v).collect();
    let rows = Matrix::from_row_major(big_n, n, data)?;
    let x_true = uniform_l1_ball(&mut rng, n, radius);
    let mut targets = rows.mul_vec(&x_true);
    let std = noise_level * linalg::norm(&targets) / (big_n as f64).sqrt();
    if std > 0.0 {
        for t in targets.iter_mut() {
            let e: f64 = StandardNormal.sample(&mut rng);
            *t += std * e;
        }
    }
    LogSumProblem::new(rows, targets, radius, Some(x_true))
}
