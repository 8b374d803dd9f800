//! Scalar abstraction for the probability algebra.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating scalar for pmf weights and information measures.
pub trait Prob: Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static {
    /// Tolerance on total mass and on conditional-slice sums.
    const MASS_TOL: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Prob for f64 {
    const MASS_TOL: f64 = 1e-9;
}

impl Prob for f32 {
    const MASS_TOL: f64 = 1e-5;
}
