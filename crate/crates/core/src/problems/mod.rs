//! Benchmark problem instances.

mod holder;
mod logsum;
mod quadratic;

pub use holder::{estimate_holder_constant, generate_holder_instance, HOLDER_BOX};
pub use logsum::{generate_logsum_instance, LogSumProblem, DEFAULT_NOISE_LEVEL};
pub use quadratic::{generate_quadratic_instance, QuadraticProblem};
