//! Motzkin paths, weighted path measures and their transfer-matrix and
//! integral representations.

mod integral;
mod measure;
mod path;
mod transfer;
mod weights;

pub use integral::{integral_expectation, integral_normalizing_constant, path_moment_integral};
pub use measure::{sample_path, task_rng, PathMeasure};
pub use path::{enumerate_paths, horizontal_count, path_weight, MotzkinPath, MAX_ENUMERATION_LENGTH};
pub use transfer::{
    ln_normalizing_constant, ln_partition_weight, matrix_ansatz_expectation, normalizing_constant,
    partition_weight, ScaledVector, TruncatedOperator, DEFAULT_HEIGHT_CAP,
};
pub use weights::{TabulatedWeights, WeightModel};
