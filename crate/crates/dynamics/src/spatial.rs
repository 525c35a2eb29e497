//! Frame-tagged rigid-body transforms and the adjoint machinery that moves
//! twists, wrenches, and spatial inertias between frames.
//!
//! # Conventions
//!
//! Six-dimensional quantities keep their **translational part first**: a twist
//! is `[v; w]` (linear velocity, then angular velocity) and a wrench is
//! `[f; tau]` (force, then moment). All 3-by-3 block extractions elsewhere in
//! the crate rely on this layout.
//!
//! A [`SpatialTransform`] with rotation `R` and translation `t` maps point
//! coordinates from its `from_frame` into its `to_frame`:
//!
//! ```text
//! p_to = R * p_from + t
//! ```
//!
//! The twist adjoint of that transform is, bit for bit,
//!
//! ```text
//! v_to = R * v_from + [t]x * R * w_from
//! w_to = R * w_from
//! ```
//!
//! with `[t]x` the usual skew-symmetric cross-product matrix. The wrench
//! transform is the inverse-transpose of the twist adjoint, so the power
//! pairing `<w, v> = f . v + tau . w` is invariant:
//!
//! ```text
//! f_to   = R * f_from
//! tau_to = R * tau_from + [t]x * R * f_from
//! ```
//!
//! Every operation checks that the operand's frame tag matches the
//! transform's `from_frame`; a mismatch is a hard [`SpatialError::FrameMismatch`],
//! never a silent re-expression.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};
use crate::scalar::{geometry_tol, lit, Real};

/// Absolute tolerance for orthonormality and round-trip identities on
/// SI-unit quantities.
pub const GEOMETRY_TOL: f64 = 1e-10;

/// Errors from frame bookkeeping and spatial-quantity validation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpatialError {
    /// An operand was expressed in a different frame than the operation expects.
    #[error("frame mismatch: expected `{expected}`, found `{found}`")]
    FrameMismatch { expected: String, found: String },
    /// The rotation block is not a proper rotation (orthonormal, det +1).
    #[error("rotation matrix is not orthonormal with determinant +1 (defect {defect:e})")]
    NonOrthonormalRotation { defect: f64 },
    /// An inertia failed its physical-validity checks.
    #[error("invalid spatial inertia: {reason}")]
    InvalidInertia { reason: String },
}

fn check_frame(expected: &str, found: &str) -> Result<(), SpatialError> {
    if expected == found {
        Ok(())
    } else {
        Err(SpatialError::FrameMismatch {
            expected: expected.to_owned(),
            found: found.to_owned(),
        })
    }
}

/// Skew-symmetric cross-product matrix: `skew(a) * b == a.cross(&b)`.
pub fn skew<T: Real>(v: &Vector3<T>) -> Matrix3<T> {
    Matrix3::new(
        T::zero(),
        -v.z,
        v.y,
        v.z,
        T::zero(),
        -v.x,
        -v.y,
        v.x,
        T::zero(),
    )
}

/// Rigid transform between two named frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialTransform<T: Real> {
    rotation: Matrix3<T>,
    translation: Vector3<T>,
    from_frame: String,
    to_frame: String,
}

impl<T: Real> SpatialTransform<T> {
    /// Builds a transform after validating that `rotation` is a proper
    /// rotation within [`GEOMETRY_TOL`].
    pub fn new(
        rotation: Matrix3<T>,
        translation: Vector3<T>,
        from_frame: impl Into<String>,
        to_frame: impl Into<String>,
    ) -> Result<Self, SpatialError> {
        let defect_m = rotation.transpose() * rotation - Matrix3::identity();
        let mut defect = defect_m.norm();
        defect += (rotation.determinant() - T::one()).abs();
        if defect > geometry_tol::<T>() {
            return Err(SpatialError::NonOrthonormalRotation {
                defect: defect.to_subset().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            rotation,
            translation,
            from_frame: from_frame.into(),
            to_frame: to_frame.into(),
        })
    }

    /// Identity transform on a single frame.
    pub fn identity(frame: impl Into<String>) -> Self {
        let frame = frame.into();
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
            from_frame: frame.clone(),
            to_frame: frame,
        }
    }

    /// Pure translation (the `from_frame` origin sits at `t` in `to_frame`).
    pub fn translation_only(
        t: Vector3<T>,
        from_frame: impl Into<String>,
        to_frame: impl Into<String>,
    ) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: t,
            from_frame: from_frame.into(),
            to_frame: to_frame.into(),
        }
    }

    pub fn rotation(&self) -> &Matrix3<T> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<T> {
        &self.translation
    }

    pub fn from_frame(&self) -> &str {
        &self.from_frame
    }

    pub fn to_frame(&self) -> &str {
        &self.to_frame
    }

    /// Re-labels both frame tags without touching the geometry.
    pub fn with_frames(
        mut self,
        from_frame: impl Into<String>,
        to_frame: impl Into<String>,
    ) -> Self {
        self.from_frame = from_frame.into();
        self.to_frame = to_frame.into();
        self
    }

    /// `self ∘ inner`: first apply `inner`, then `self`. Requires
    /// `inner.to_frame == self.from_frame`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SpatialError> {
        check_frame(&self.from_frame, &inner.to_frame)?;
        Ok(Self {
            rotation: self.rotation * inner.rotation,
            translation: self.rotation * inner.translation + self.translation,
            from_frame: inner.from_frame.clone(),
            to_frame: self.to_frame.clone(),
        })
    }

    /// Inverse transform (swaps the frame tags).
    pub fn invert(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
            from_frame: self.to_frame.clone(),
            to_frame: self.from_frame.clone(),
        }
    }

    /// Maps point coordinates from `from_frame` to `to_frame`.
    pub fn transform_point(&self, p: &Vector3<T>) -> Vector3<T> {
        self.rotation * p + self.translation
    }

    /// The 6-by-6 twist adjoint `[[R, [t]x R], [0, R]]` in `[v; w]` layout.
    pub fn adjoint_matrix(&self) -> Matrix6<T> {
        let mut ad = Matrix6::zeros();
        let tr = skew(&self.translation) * self.rotation;
        ad.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        ad.fixed_view_mut::<3, 3>(0, 3).copy_from(&tr);
        ad.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.rotation);
        ad
    }

    /// The 6-by-6 wrench transform, the inverse-transpose of
    /// [`Self::adjoint_matrix`], in `[f; tau]` layout.
    pub fn wrench_transform_matrix(&self) -> Matrix6<T> {
        let mut ad = Matrix6::zeros();
        let tr = skew(&self.translation) * self.rotation;
        ad.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        ad.fixed_view_mut::<3, 3>(3, 0).copy_from(&tr);
        ad.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.rotation);
        ad
    }

    /// Re-expresses a twist tagged with `from_frame` in `to_frame`.
    pub fn adjoint_twist(&self, v: &Twist<T>) -> Result<Twist<T>, SpatialError> {
        check_frame(&self.from_frame, &v.frame)?;
        let rw = self.rotation * v.angular;
        Ok(Twist {
            linear: self.rotation * v.linear + self.translation.cross(&rw),
            angular: rw,
            frame: self.to_frame.clone(),
        })
    }

    /// Re-expresses a wrench tagged with `from_frame` in `to_frame`,
    /// preserving the power pairing against any twist.
    pub fn coadjoint_wrench(&self, w: &Wrench<T>) -> Result<Wrench<T>, SpatialError> {
        check_frame(&self.from_frame, &w.frame)?;
        let rf = self.rotation * w.force;
        Ok(Wrench {
            moment: self.rotation * w.moment + self.translation.cross(&rf),
            force: rf,
            frame: self.to_frame.clone(),
        })
    }

    /// Transports a spatial inertia from `from_frame` to `to_frame`.
    ///
    /// Kinetic energy is invariant: for any twist `v` in the source frame,
    /// `<v, I v> == <v', I' v'>` with `v'` the adjoint-transformed twist.
    pub fn transform_inertia(&self, i: &SpatialInertia<T>) -> Result<SpatialInertia<T>, SpatialError> {
        check_frame(&self.from_frame, &i.frame)?;
        let com = self.transform_point(&i.com_offset);
        // Shift the origin-referenced rotational inertia to the COM, rotate,
        // then shift back out to the new frame origin.
        let i_com = i.rotational_inertia - parallel_axis_term(i.mass, &i.com_offset);
        let i_com_new = self.rotation * i_com * self.rotation.transpose();
        Ok(SpatialInertia {
            mass: i.mass,
            com_offset: com,
            rotational_inertia: i_com_new + parallel_axis_term(i.mass, &com),
            frame: self.to_frame.clone(),
        })
    }
}

/// Rigid-body velocity with translational part first.
#[derive(Debug, Clone, PartialEq)]
pub struct Twist<T: Real> {
    /// Linear velocity (m/s), first three entries of the 6-vector form.
    pub linear: Vector3<T>,
    /// Angular velocity (rad/s).
    pub angular: Vector3<T>,
    /// Frame the twist is expressed in.
    pub frame: String,
}

impl<T: Real> Twist<T> {
    pub fn new(linear: Vector3<T>, angular: Vector3<T>, frame: impl Into<String>) -> Self {
        Self {
            linear,
            angular,
            frame: frame.into(),
        }
    }

    pub fn zero(frame: impl Into<String>) -> Self {
        Self::new(Vector3::zeros(), Vector3::zeros(), frame)
    }

    /// `[v; w]` stacking.
    pub fn to_vector(&self) -> Vector6<T> {
        let mut out = Vector6::zeros();
        out.fixed_rows_mut::<3>(0).copy_from(&self.linear);
        out.fixed_rows_mut::<3>(3).copy_from(&self.angular);
        out
    }

    pub fn from_vector(v: &Vector6<T>, frame: impl Into<String>) -> Self {
        Self::new(v.fixed_rows::<3>(0).into(), v.fixed_rows::<3>(3).into(), frame)
    }
}

/// Force/moment pair, dual to [`Twist`] (force first).
#[derive(Debug, Clone, PartialEq)]
pub struct Wrench<T: Real> {
    /// Force (N), first three entries of the 6-vector form.
    pub force: Vector3<T>,
    /// Moment (N m).
    pub moment: Vector3<T>,
    /// Frame the wrench is expressed in.
    pub frame: String,
}

impl<T: Real> Wrench<T> {
    pub fn new(force: Vector3<T>, moment: Vector3<T>, frame: impl Into<String>) -> Self {
        Self {
            force,
            moment,
            frame: frame.into(),
        }
    }

    /// `[f; tau]` stacking.
    pub fn to_vector(&self) -> Vector6<T> {
        let mut out = Vector6::zeros();
        out.fixed_rows_mut::<3>(0).copy_from(&self.force);
        out.fixed_rows_mut::<3>(3).copy_from(&self.moment);
        out
    }

    pub fn from_vector(v: &Vector6<T>, frame: impl Into<String>) -> Self {
        Self::new(v.fixed_rows::<3>(0).into(), v.fixed_rows::<3>(3).into(), frame)
    }

    /// Power produced against a twist in the same frame.
    pub fn power(&self, v: &Twist<T>) -> Result<T, SpatialError> {
        check_frame(&self.frame, &v.frame)?;
        Ok(self.force.dot(&v.linear) + self.moment.dot(&v.angular))
    }
}

fn parallel_axis_term<T: Real>(mass: T, offset: &Vector3<T>) -> Matrix3<T> {
    let s = skew(offset);
    s.transpose() * s * mass
}

/// Mass distribution of a rigid body, expressed in a named frame.
///
/// `rotational_inertia` is taken **about the frame origin** (not the COM), in
/// frame coordinates; `com_offset` locates the COM relative to that origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialInertia<T: Real> {
    mass: T,
    com_offset: Vector3<T>,
    rotational_inertia: Matrix3<T>,
    frame: String,
}

impl<T: Real> SpatialInertia<T> {
    /// Validates and builds a spatial inertia.
    ///
    /// Checks: positive mass; symmetric rotational inertia; positive
    /// semidefinite eigenvalues (a point mass at the origin is legal); the
    /// triangle inequality on principal moments, which any mass density
    /// satisfies about any reference point.
    pub fn new(
        mass: T,
        com_offset: Vector3<T>,
        rotational_inertia: Matrix3<T>,
        frame: impl Into<String>,
    ) -> Result<Self, SpatialError> {
        let invalid = |reason: &str| SpatialError::InvalidInertia {
            reason: reason.to_owned(),
        };
        if mass <= T::zero() {
            return Err(invalid("mass must be positive"));
        }
        let asym = (rotational_inertia - rotational_inertia.transpose()).norm();
        if asym > lit::<T>(1e-8).max(T::epsilon() * lit(1e4)) {
            return Err(invalid("rotational inertia must be symmetric"));
        }
        let eig = rotational_inertia.symmetric_eigenvalues();
        let scale = T::one().max(rotational_inertia.norm());
        for i in 0..3 {
            if eig[i] < -geometry_tol::<T>() * scale {
                return Err(invalid("rotational inertia must be positive semidefinite"));
            }
        }
        let sum: T = eig.iter().copied().fold(T::zero(), |a, b| a + b);
        for i in 0..3 {
            // triangle inequality: I1 + I2 >= I3 for every permutation
            if sum - eig[i] - eig[i] < -geometry_tol::<T>() * scale {
                return Err(invalid(
                    "principal moments must satisfy the triangle inequality",
                ));
            }
        }
        Ok(Self {
            mass,
            com_offset,
            rotational_inertia,
            frame: frame.into(),
        })
    }

    /// Inertia of a point mass located at `at` in the given frame.
    pub fn point_mass(mass: T, at: Vector3<T>, frame: impl Into<String>) -> Result<Self, SpatialError> {
        Self::new(mass, at, parallel_axis_term(mass, &at), frame)
    }

    /// Builds from an inertia tensor given **about the COM** (the usual
    /// robot-description convention), shifting it to the frame origin.
    pub fn from_com_inertia(
        mass: T,
        com_offset: Vector3<T>,
        inertia_about_com: Matrix3<T>,
        frame: impl Into<String>,
    ) -> Result<Self, SpatialError> {
        let about_origin = inertia_about_com + parallel_axis_term(mass, &com_offset);
        Self::new(mass, com_offset, about_origin, frame)
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn com_offset(&self) -> &Vector3<T> {
        &self.com_offset
    }

    /// Rotational inertia about the frame origin.
    pub fn rotational_inertia(&self) -> &Matrix3<T> {
        &self.rotational_inertia
    }

    /// Rotational inertia about the COM.
    pub fn rotational_inertia_about_com(&self) -> Matrix3<T> {
        self.rotational_inertia - parallel_axis_term(self.mass, &self.com_offset)
    }

    pub fn frame(&self) -> &str {
        &self.frame
    }

    /// The 6-by-6 form in `[v; w]` layout:
    /// `[[m I, -m [c]x], [m [c]x, I_o]]`.
    pub fn to_matrix(&self) -> Matrix6<T> {
        let mut out = Matrix6::zeros();
        let mc = skew(&self.com_offset) * self.mass;
        out.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(Matrix3::identity() * self.mass));
        out.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-mc));
        out.fixed_view_mut::<3, 3>(3, 0).copy_from(&mc);
        out.fixed_view_mut::<3, 3>(3, 3)
            .copy_from(&self.rotational_inertia);
        out
    }

    /// Momentum `[m v_com-ish; angular]` carried by this body moving with `v`,
    /// expressed in the same frame. Momentum transforms like a wrench.
    pub fn momentum(&self, v: &Twist<T>) -> Result<Vector6<T>, SpatialError> {
        check_frame(&self.frame, &v.frame)?;
        Ok(self.to_matrix() * v.to_vector())
    }

    /// Kinetic energy of the body moving with twist `v` (same frame).
    pub fn kinetic_energy(&self, v: &Twist<T>) -> Result<T, SpatialError> {
        check_frame(&self.frame, &v.frame)?;
        let vv = v.to_vector();
        Ok((self.to_matrix() * vv).dot(&vv) * lit(0.5))
    }

    /// Sum of two inertias expressed in the same frame.
    pub fn add(&self, other: &Self) -> Result<Self, SpatialError> {
        check_frame(&self.frame, &other.frame)?;
        let mass = self.mass + other.mass;
        Ok(Self {
            mass,
            com_offset: (self.com_offset * self.mass + other.com_offset * other.mass) / mass,
            rotational_inertia: self.rotational_inertia + other.rotational_inertia,
            frame: self.frame.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v3(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    fn rot_xyz(a: f64, b: f64, c: f64) -> Matrix3<f64> {
        nalgebra::Rotation3::from_euler_angles(a, b, c).into_inner()
    }

    #[test]
    fn identity_leaves_twist_unchanged() {
        let t = SpatialTransform::<f64>::identity("a");
        let v = Twist::new(v3(0.3, -0.1, 2.0), v3(0.0, 0.5, -0.2), "a");
        let out = t.adjoint_twist(&v).unwrap();
        assert_eq!(out.linear, v.linear);
        assert_eq!(out.angular, v.angular);
    }

    #[test]
    fn pure_translation_lever_arm() {
        // t = (1,0,0), w = (0,0,1): linear picks up t x w = (0,-1,0) under the
        // documented adjoint formula (see the module docs for the convention).
        let t = SpatialTransform::translation_only(v3(1.0, 0.0, 0.0), "a", "b");
        let v = Twist::new(Vector3::zeros(), v3(0.0, 0.0, 1.0), "a");
        let out = t.adjoint_twist(&v).unwrap();
        assert_relative_eq!(out.linear, v3(0.0, -1.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(out.angular, v3(0.0, 0.0, 1.0), epsilon = 1e-15);
        assert_eq!(out.frame, "b");
    }

    #[test]
    fn identity_leaves_wrench_unchanged() {
        let t = SpatialTransform::<f64>::identity("a");
        let w = Wrench::new(v3(1.0, 2.0, 3.0), v3(-1.0, 0.0, 0.5), "a");
        let out = t.coadjoint_wrench(&w).unwrap();
        assert_eq!(out.force, w.force);
        assert_eq!(out.moment, w.moment);
    }

    #[test]
    fn pure_force_gains_lever_arm_moment() {
        // force (1,0,0) applied at a frame whose origin sits at t=(0,1,0):
        // moment picks up t x f = (0,0,-1).
        let t = SpatialTransform::translation_only(v3(0.0, 1.0, 0.0), "a", "b");
        let w = Wrench::new(v3(1.0, 0.0, 0.0), Vector3::zeros(), "a");
        let out = t.coadjoint_wrench(&w).unwrap();
        assert_relative_eq!(out.moment, v3(0.0, 0.0, -1.0), epsilon = 1e-15);
        assert_relative_eq!(out.force, v3(1.0, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn frame_mismatch_is_an_error() {
        let t = SpatialTransform::<f64>::identity("a");
        let v = Twist::new(v3(1.0, 0.0, 0.0), Vector3::zeros(), "b");
        assert!(matches!(
            t.adjoint_twist(&v),
            Err(SpatialError::FrameMismatch { .. })
        ));
        let w = Wrench::new(v3(1.0, 0.0, 0.0), Vector3::zeros(), "b");
        assert!(matches!(
            t.coadjoint_wrench(&w),
            Err(SpatialError::FrameMismatch { .. })
        ));
    }

    #[test]
    fn non_orthonormal_rotation_rejected() {
        let mut r = Matrix3::<f64>::identity();
        r[(0, 1)] = 0.2;
        assert!(matches!(
            SpatialTransform::new(r, Vector3::zeros(), "a", "b"),
            Err(SpatialError::NonOrthonormalRotation { .. })
        ));
    }

    #[test]
    fn compose_and_invert_give_identity() {
        let t = SpatialTransform::new(rot_xyz(0.3, -0.8, 1.4), v3(0.2, -1.0, 0.4), "a", "b")
            .unwrap();
        let id = t.compose(&t.invert()).unwrap();
        assert_relative_eq!(*id.rotation(), Matrix3::identity(), epsilon = 1e-10);
        assert_relative_eq!(*id.translation(), Vector3::zeros(), epsilon = 1e-10);
        assert_eq!(id.from_frame(), "b");
        assert_eq!(id.to_frame(), "b");
    }

    #[test]
    fn point_mass_transport_is_parallel_axis() {
        // m = 2 at the origin, moved out to t = (0,0,1): the rotational
        // inertia about the new origin gains m * [t]x^T [t]x = diag(2,2,0).
        let i = SpatialInertia::point_mass(2.0, Vector3::zeros(), "a").unwrap();
        let t = SpatialTransform::translation_only(v3(0.0, 0.0, 1.0), "a", "b");
        let out = t.transform_inertia(&i).unwrap();
        assert_relative_eq!(
            *out.rotational_inertia(),
            Matrix3::from_diagonal(&v3(2.0, 2.0, 0.0)),
            epsilon = 1e-14
        );
        assert_relative_eq!(out.mass(), 2.0);
        assert_relative_eq!(*out.com_offset(), v3(0.0, 0.0, 1.0), epsilon = 1e-14);
    }

    #[test]
    fn identity_transport_preserves_inertia() {
        let i = SpatialInertia::new(
            1.5,
            v3(0.1, -0.2, 0.05),
            Matrix3::from_diagonal(&v3(0.4, 0.5, 0.6)),
            "a",
        )
        .unwrap();
        let out = SpatialTransform::identity("a").transform_inertia(&i).unwrap();
        assert_relative_eq!(
            *out.rotational_inertia(),
            *i.rotational_inertia(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn invalid_inertias_rejected() {
        assert!(SpatialInertia::new(-1.0, Vector3::zeros(), Matrix3::identity(), "a").is_err());
        // negative eigenvalue
        assert!(SpatialInertia::new(
            1.0,
            Vector3::zeros(),
            Matrix3::from_diagonal(&v3(1.0, 1.0, -0.1)),
            "a"
        )
        .is_err());
        // violates the triangle inequality: 1 + 1 < 3
        assert!(SpatialInertia::new(
            1.0,
            Vector3::zeros(),
            Matrix3::from_diagonal(&v3(1.0, 1.0, 3.0)),
            "a"
        )
        .is_err());
    }

    prop_compose! {
        fn transform_strategy(tag: &'static str, from: &'static str, to: &'static str)(
            roll in -3.0f64..3.0,
            pitch in -1.5f64..1.5,
            yaw in -3.0f64..3.0,
            tx in -2.0f64..2.0,
            ty in -2.0f64..2.0,
            tz in -2.0f64..2.0,
        ) -> SpatialTransform<f64> {
            let _ = tag;
            SpatialTransform::new(rot_xyz(roll, pitch, yaw), v3(tx, ty, tz), from, to).unwrap()
        }
    }

    prop_compose! {
        fn twist_strategy(frame: &'static str)(
            a in proptest::array::uniform6(-2.0f64..2.0),
        ) -> Twist<f64> {
            Twist::new(v3(a[0], a[1], a[2]), v3(a[3], a[4], a[5]), frame)
        }
    }

    proptest! {
        #[test]
        fn adjoint_of_composition_is_composition_of_adjoints(
            t1 in transform_strategy("t1", "b", "c"),
            t2 in transform_strategy("t2", "a", "b"),
            v in twist_strategy("a"),
        ) {
            let composed = t1.compose(&t2).unwrap();
            let lhs = composed.adjoint_twist(&v).unwrap();
            let rhs = t1.adjoint_twist(&t2.adjoint_twist(&v).unwrap()).unwrap();
            prop_assert!((lhs.to_vector() - rhs.to_vector()).norm() < 1e-10);
        }

        #[test]
        fn twist_and_wrench_transforms_are_dual(
            t in transform_strategy("t", "a", "b"),
            v in twist_strategy("a"),
            w in proptest::array::uniform6(-3.0f64..3.0),
        ) {
            let w = Wrench::new(v3(w[0], w[1], w[2]), v3(w[3], w[4], w[5]), "a");
            let v_b = t.adjoint_twist(&v).unwrap();
            let w_b = t.coadjoint_wrench(&w).unwrap();
            let p_a = w.power(&v).unwrap();
            let p_b = w_b.power(&v_b).unwrap();
            prop_assert!((p_a - p_b).abs() < 1e-10);
        }

        #[test]
        fn inertia_transport_preserves_energy_mass_and_definiteness(
            t in transform_strategy("t", "a", "b"),
            v in twist_strategy("a"),
            com in proptest::array::uniform3(-0.3f64..0.3),
            moments in proptest::array::uniform3(0.1f64..1.0),
        ) {
            // build a physical inertia: diagonal about the COM, shifted out
            let (i1, i2, i3) = (moments[0], moments[1], moments[0] + moments[1] + moments[2]*0.5);
            let i_com = Matrix3::from_diagonal(&v3(i1 + i3, i2 + i3, i1 + i2));
            let inertia = SpatialInertia::from_com_inertia(
                2.0, v3(com[0], com[1], com[2]), i_com, "a",
            ).unwrap();
            let moved = t.transform_inertia(&inertia).unwrap();
            prop_assert_eq!(moved.mass(), inertia.mass());
            let e_a = inertia.kinetic_energy(&v).unwrap();
            let e_b = moved.kinetic_energy(&t.adjoint_twist(&v).unwrap()).unwrap();
            prop_assert!((e_a - e_b).abs() < 1e-10 * (1.0 + e_a.abs()));
            // definiteness of the 6x6 form survives the transport
            prop_assert!(nalgebra::Cholesky::new(moved.to_matrix()).is_some());
        }
    }
}
