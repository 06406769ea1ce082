//! Moment-injective embeddings of multisets and discrete measures.
//!
//! The crate covers four areas:
//!
//! * [`embed`]: moment maps `μ ↦ Σ w_i f(x_i)` built from random shallow
//!   networks, Gaussians, deep compositions, T-systems and the staircase ReLU
//!   encoder (with its exact decoder).
//! * [`witness`]: randomized separation checks for analytic embeddings, and
//!   constructive non-injectivity counterexamples for piecewise-linear ones.
//! * [`transport`]: exact and entropic Wasserstein distances, the empirical
//!   bi-Lipschitz harness, Jacobian singular-value maps and the instability
//!   probe.
//! * [`graph`]: 1-WL color refinement, random-parameter message passing and
//!   the coloring comparison between the two.
//!
//! All randomness flows from an explicit [`Seed`].

pub mod activation;
pub mod embed;
mod error;
pub mod graph;
pub mod linalg;
pub mod measure;
mod seed;
pub mod transport;
pub mod witness;

pub use activation::{Activation, Regularity};
pub use error::{Error, Result};
pub use measure::{DiscreteMeasure, Multiset, Point};
pub use seed::Seed;

/// Library version echoed into experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
