//! Strong coordination over multi-hop line networks.
//!
//! The crate covers the probability algebra ([`prob`]), the combinatorics of
//! the auxiliary-variable system on a line ([`line`]), analytic rate
//! machinery ([`rates`]), nested random codebooks ([`codebooks`]), the
//! coordination schemes ([`codec`]) and exact/Monte Carlo evaluation
//! ([`eval`]).

// `!(x >= 0)` style tests reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod caps;
pub mod codebooks;
pub mod codec;
pub mod error;
pub mod eval;
pub mod line;
pub mod presets;
pub mod prob;
pub mod rates;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Prob;

/// Double-precision pmf, the default value type.
pub type JointPmf = prob::Pmf<f64>;
/// Double-precision conditional kernel.
pub type ConditionalKernel = prob::Kernel<f64>;
