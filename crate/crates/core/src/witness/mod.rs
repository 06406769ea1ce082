//! Separation checks for analytic moment maps and non-injectivity witnesses
//! for piecewise-linear ones.

mod counterexample;
mod pigeonhole;
mod region;
mod separation;

pub use counterexample::{
    affine_dependence_pair, affine_null_weights, pwl_counterexample_alphabet, pwl_counterexample_integers,
    pwl_counterexample_measures, pwl_counterexample_sets, set_split_pair, CounterexampleKind,
    CounterexamplePair, SplitRule,
};
pub use pigeonhole::{pwl_pigeonhole_bound, upper_region_bound};
pub use region::{find_linear_region, is_locally_linear, DEFAULT_PROBES, MAX_REGION_ATTEMPTS};
pub use separation::{normalized_distance, verify_separation, SeparationReport, DEFAULT_TOLERANCE};
