//! Scalar abstraction: the whole library is generic over the floating-point
//! type through the [`Real`] trait, with `f64` as the default choice exposed
//! by the type aliases at the crate root.

use nalgebra as na;
use num_traits as nt;

/// Floating-point scalar usable throughout the library (`f32` or `f64`).
pub trait Real: Copy + nt::FloatConst + nt::FromPrimitive + na::RealField {
    /// Machine epsilon of the concrete type.
    fn epsilon() -> Self;
}

impl Real for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

/// Validation tolerance for geometric identities: the crate-wide 1e-10 on
/// SI-unit quantities, loosened where the scalar's epsilon cannot express it
/// (f32 lands near 1e-5).
pub fn geometry_tol<T: Real>() -> T {
    lit::<T>(1e-10).max(T::epsilon() * lit(100.0))
}

/// Pulls an `f64` constant into the working scalar type.
///
/// Tolerances and integrator coefficients are written once as `f64` literals
/// and converted at use sites; the conversion is lossy for `f32` in the usual
/// rounding sense only.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must be representable in the scalar type")
}
