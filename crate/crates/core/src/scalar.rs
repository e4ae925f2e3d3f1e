//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the bound computations are generic over.
///
/// The associated tolerances scale the numerical checks (Hermiticity,
/// positivity, rank detection) to the precision of the type.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Max element-wise deviation from Hermiticity accepted for a density matrix.
    const HERMITIAN_TOL: f64;
    /// Eigenvalues in `[-PSD_SLACK, 0]` are clipped to zero; below that a state is invalid.
    const PSD_SLACK: f64;
    /// Gram eigenvalues below this are treated as zero when embedding.
    const RANK_TOL: f64;
    /// Trace bookkeeping tolerance.
    const TRACE_TOL: f64;
    /// Accepted deviation from unit norm for a state vector.
    const NORM_TOL: f64;
    /// Slack on probability arguments before they are rejected.
    const PROB_SLACK: f64;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::c(2.0)
    }

    #[inline]
    fn half() -> Self {
        Self::c(0.5)
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: f64 = 1e-10;
    const PSD_SLACK: f64 = 1e-9;
    const RANK_TOL: f64 = 1e-10;
    const TRACE_TOL: f64 = 1e-9;
    const NORM_TOL: f64 = 1e-10;
    const PROB_SLACK: f64 = 1e-12;
}

impl Real for f32 {
    const HERMITIAN_TOL: f64 = 1e-5;
    const PSD_SLACK: f64 = 1e-5;
    const RANK_TOL: f64 = 1e-5;
    const TRACE_TOL: f64 = 1e-5;
    const NORM_TOL: f64 = 1e-5;
    const PROB_SLACK: f64 = 1e-6;
}
