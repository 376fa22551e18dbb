//! Floating-point scalar abstraction.
//!
//! Everything numeric in this crate is generic over [`Real`], implemented for
//! `f32` and `f64`. Numerical tolerances live on the trait because a threshold
//! like `1e-12` is meaningful in double precision only.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar usable by the linear algebra, channel and optimizer code.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Maximum entrywise `|M - M^†|` for a matrix to count as Hermitian.
    fn hermitian_tol() -> Self;

    /// Eigenvalues in `[-floor, 0)` are clamped to zero; below that a matrix is
    /// rejected as not positive semidefinite.
    fn psd_floor() -> Self;

    /// Looser floor accepted on the joint state while the optimizer probes the
    /// complete-positivity boundary.
    fn boundary_floor() -> Self;

    /// A channel is completely positive iff its minimum Choi eigenvalue is at
    /// least `-cp_tol()`.
    fn cp_tol() -> Self;

    /// Converts an `f64` literal. Infallible for the supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Real for f64 {
    fn hermitian_tol() -> Self {
        1e-12
    }
    fn psd_floor() -> Self {
        1e-9
    }
    fn boundary_floor() -> Self {
        1e-8
    }
    fn cp_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn hermitian_tol() -> Self {
        1e-5
    }
    fn psd_floor() -> Self {
        1e-5
    }
    fn boundary_floor() -> Self {
        1e-4
    }
    fn cp_tol() -> Self {
        1e-5
    }
}
