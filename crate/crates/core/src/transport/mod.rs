//! Wasserstein distances and the empirical stability harnesses built on them.

mod bilipschitz;
mod exact;
mod instability;
mod jacobian;
mod sinkhorn;

pub use bilipschitz::{
    bilipschitz_experiment, ratio_records_csv, BiLipschitzConfig, RatioRecord, TransportMethod,
    RATIO_CSV_HEADER,
};
pub use exact::{wasserstein_exact, EXACT_SUPPORT_LIMIT, MASS_TOLERANCE};
pub use instability::{instability_probe, loglog_slope};
pub use jacobian::{diagonal_runs, jacobian_csv, jacobian_ratio_map, unit_grid, JACOBIAN_CSV_HEADER};
pub use sinkhorn::{
    sinkhorn, sinkhorn_default, OTConfig, SinkhornOutcome, DEFAULT_MAX_ITERS, DEFAULT_RELATIVE_EPSILON,
    DEFAULT_TOLERANCE,
};
