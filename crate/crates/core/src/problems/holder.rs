//! Separable Hölder-smooth instances.

use rand::{Rng, RngCore};

use crate::error::{invalid, Result};
use crate::linalg;
use crate::objective::Objective;
use crate::oracle::HolderFunction;
use crate::random::{seeded, uniform_box};

/// Half-width of the test box `[-4, 4]^n` used for estimation and certification.
pub const HOLDER_BOX: f64 = 4.0;

const ESTIMATION_PAIRS: usize = 10_000;
const INFLATION: f64 = 1.1;

/// Largest `‖g(x) - g(y)‖ / ‖x - y‖^ν` seen over sampled pairs in the box.
///
/// A third of the pairs are independent, a third are reflections of each
/// other through the centers (where the ratio peaks) and the rest are close
/// neighbours.
pub fn estimate_holder_constant(f: &HolderFunction, pairs: usize, rng: &mut dyn RngCore) -> f64 {
    let n = f.dim();
    let mut best: f64 = 0.0;
    for i in 0..pairs {
        let x = uniform_box(rng, n, -HOLDER_BOX, HOLDER_BOX);
        let y: Vec<f64> = match i % 3 {
            0 => uniform_box(rng, n, -HOLDER_BOX, HOLDER_BOX),
            1 => {
                let t: f64 = rng.random();
                f.centers
                    .iter()
                    .zip(&x)
                    .map(|(c, xi)| {
                        let d = t * (xi - c);
                        (c - d).clamp(-HOLDER_BOX, HOLDER_BOX)
                    })
                    .collect()
            }
            _ => {
                let s = 10f64.powf(-3.0 * rng.random::<f64>());
                x.iter()
                    .map(|xi| (xi + s * rng.random_range(-1.0..1.0)).clamp(-HOLDER_BOX, HOLDER_BOX))
                    .collect()
            }
        };
        let r = linalg::dist(&x, &y);
        if r > 0.0 {
            let ratio = linalg::dist(&f.gradient(&x), &f.gradient(&y)) / r.powf(f.exponent);
            best = best.max(ratio);
        }
    }
    best
}

/// `F(x) = Σ |x_i - c_i|^{1+ν}/(1+ν)` with `c ~ U(-1, 1)^n`.
///
/// `H_ν` is the empirical estimate inflated by 10%; `ν = 1` gives `H = 1` exactly.
pub fn generate_holder_instance(n: usize, nu: f64, seed: u64) -> Result<HolderFunction> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(invalid("nu", format!("must lie in (0, 1], got {nu}")));
    }
    let mut rng = seeded(seed);
    let centers = uniform_box(&mut rng, n, -1.0, 1.0);
    if nu == 1.0 {
        return HolderFunction::new(1.0, 1.0, centers);
    }
    let probe = HolderFunction::new(nu, 1.0, centers.clone())?;
    let h = INFLATION * estimate_holder_constant(&probe, ESTIMATION_PAIRS, &mut rng);
    HolderFunction::new(nu, h, centers)
}
