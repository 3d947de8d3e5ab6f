//! Priority vectors of pairwise comparison matrices and the disagreement
//! between the right and the inverse left eigenvector.
//!
//! - [`matrix`]: validated reciprocal matrices and weight vectors
//! - [`weighting`]: right, left, inverse-left, combined and row geometric
//!   mean priorities, plus group aggregation
//! - [`consistency`]: consistency index, random index and ratio
//! - [`metrics`]: distances and Kendall's tau between weight vectors
//! - [`montecarlo`]: perturbed random matrices and the binned experiment
//! - [`text`]: plain-text matrix format

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod consistency;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod montecarlo;
pub mod reduce;
pub mod text;
pub mod weighting;

pub use consistency::{
    consistency_index, consistency_ratio, estimate_random_index, ConsistencyReport, RiSource, RiTable,
};
pub use error::{Error, Result};
pub use matrix::{
    consistent_from_weights, is_consistent, normalize, transpose, validate, Normalization, PCMatrix, Provenance,
    RawMatrix, ReciprocityMode, ReciprocityPolicy, WeightVector,
};
pub use metrics::{chebyshev, compare_methods, euclidean, kendall_tau, max_ratio, ComparisonRecord, Metric};
pub use montecarlo::{
    closest_probability, generate_perturbed, run_simulation, BinStatistics, CrHistogram, GeneratorConfig,
    SimulationConfig, SimulationResult,
};
pub use weighting::{
    aggregate_matrices_geometric, aggregate_priorities_geometric, inverse_left, left_eigenvector, right_eigenvector,
    rl_combined, row_geometric_mean, EigenResult, EigenSolverConfig,
};
