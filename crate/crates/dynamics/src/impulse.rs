//! Impulse predictions for the reduced normal impact.
//!
//! With zero tangential impulse, the impact collapses to a single scalar
//! degree of freedom along the impact normal `n`: the normal velocity grows
//! linearly with the accumulated normal impulse at rate `n^T W n > 0`, so an
//! effective mass `m* = 1 / (n^T W n)` governs the whole phase. Everything
//! here is closed-form bookkeeping on top of that relation.

use nalgebra::{DVector, Vector3, Vector6};

use crate::chain::{ChainModel, JacobianTarget};
use crate::iim::{IimError, InverseInertiaMatrix};
use crate::scalar::{lit, Real};

/// Errors from impulse prediction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ImpulseError {
    /// Scenario invariants violated (non-unit normal, receding velocity,
    /// non-positive normal compliance).
    #[error("invalid contact scenario: {reason}")]
    InvalidScenario { reason: String },
    /// Target normal velocity below the pre-impact value.
    #[error("target normal velocity {target} below pre-impact value {pre}")]
    InvalidTarget { target: f64, pre: f64 },
    /// Restitution coefficient outside `[0, 1]`.
    #[error("coefficient of restitution {value} outside [0, 1]")]
    RestitutionOutOfRange { value: f64 },
    #[error(transparent)]
    Iim(#[from] IimError),
    #[error(transparent)]
    Chain(#[from] crate::chain::ChainError),
}

/// An impact about to happen: an IIM, a unit normal, and an approaching
/// pre-impact contact velocity.
#[derive(Debug, Clone)]
pub struct ContactScenario<T: Real> {
    w: InverseInertiaMatrix<T>,
    normal: Vector3<T>,
    v_pre: Vector3<T>,
}

impl<T: Real> ContactScenario<T> {
    /// Validates the scenario invariants: unit normal, `n . v_pre < 0`
    /// (approaching contact), and `n^T W n > 0`.
    pub fn new(
        w: InverseInertiaMatrix<T>,
        normal: Vector3<T>,
        v_pre: Vector3<T>,
    ) -> Result<Self, ImpulseError> {
        let invalid = |reason: String| ImpulseError::InvalidScenario { reason };
        if (normal.norm() - T::one()).abs() > lit::<T>(1e-9).max(T::epsilon() * lit(100.0)) {
            return Err(invalid("normal must be a unit vector".into()));
        }
        if normal.dot(&v_pre) >= T::zero() {
            return Err(invalid(
                "pre-impact velocity must approach the contact (n . v_pre < 0)".into(),
            ));
        }
        if w.along(&normal) <= T::zero() {
            return Err(invalid(
                "inverse inertia must be positive along the normal".into(),
            ));
        }
        Ok(Self { w, normal, v_pre })
    }

    pub fn w(&self) -> &InverseInertiaMatrix<T> {
        &self.w
    }

    pub fn normal(&self) -> &Vector3<T> {
        &self.normal
    }

    pub fn v_pre(&self) -> &Vector3<T> {
        &self.v_pre
    }

    /// Pre-impact normal velocity (negative).
    pub fn v_pre_normal(&self) -> T {
        self.normal.dot(&self.v_pre)
    }
}

/// Effective mass along the normal, `m* = 1 / (n^T W n)`.
pub fn effective_mass<T: Real>(s: &ContactScenario<T>) -> T {
    T::one() / s.w.along(&s.normal)
}

/// Normal impulse needed to raise the normal velocity from its pre-impact
/// value to `v_n`: `p = m* (v_n - v_n_pre)`.
pub fn impulse_for_velocity<T: Real>(s: &ContactScenario<T>, v_n: T) -> Result<T, ImpulseError> {
    let pre = s.v_pre_normal();
    if v_n < pre {
        return Err(ImpulseError::InvalidTarget {
            target: v_n.to_subset().unwrap_or(f64::NAN),
            pre: pre.to_subset().unwrap_or(f64::NAN),
        });
    }
    Ok(effective_mass(s) * (v_n - pre))
}

/// Impulse accumulated when compression ends (normal velocity reaches zero):
/// `p_nc = -v_n_pre / (n^T W n) = m* |v_n_pre|`.
pub fn compression_end_impulse<T: Real>(s: &ContactScenario<T>) -> T {
    -s.v_pre_normal() / s.w.along(&s.normal)
}

/// Impulse accumulated when restitution ends at `v_n = -e_r v_n_pre`:
/// `p = (1 + e_r) p_nc`.
pub fn restitution_end_impulse<T: Real>(
    s: &ContactScenario<T>,
    e_r: T,
) -> Result<T, ImpulseError> {
    if e_r < T::zero() || e_r > T::one() {
        return Err(ImpulseError::RestitutionOutOfRange {
            value: e_r.to_subset().unwrap_or(f64::NAN),
        });
    }
    Ok(compression_end_impulse(s) * (T::one() + e_r))
}

/// Joint-velocity jump caused by a contact impulse (pure force, no moment):
/// `dqdot = M^-1 J^T [p; 0]`.
pub fn joint_velocity_jump<T: Real>(
    model: &ChainModel<T>,
    q: &DVector<T>,
    impulse: &Vector3<T>,
) -> Result<DVector<T>, ImpulseError> {
    let jac = model.body_jacobian(q, JacobianTarget::ContactPoint)?;
    let m = model.joint_space_inertia(q)?;
    let chol = m.cholesky().ok_or(IimError::SingularInertia)?;
    let mut w6 = Vector6::zeros();
    w6.fixed_rows_mut::<3>(0).copy_from(impulse);
    let generalized = jac.transpose() * w6;
    Ok(chol.solve(&generalized))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iim::{self, IimMethod};
    use crate::synth;
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;

    fn isotropic_scenario(mass: f64, v_n: f64) -> ContactScenario<f64> {
        let w = InverseInertiaMatrix::new(
            Matrix3::identity() / mass,
            IimMethod::Crb,
            "contact",
        );
        ContactScenario::new(w, Vector3::z(), Vector3::new(0.0, 0.0, v_n)).unwrap()
    }

    #[test]
    fn effective_mass_of_isotropic_w() {
        let s = isotropic_scenario(2.0, -0.1);
        assert_relative_eq!(effective_mass(&s), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn effective_mass_of_rod_tip_is_quarter_mass() {
        let (m, l) = (2.8, 1.1);
        let model = synth::pendulum(m, l);
        let q = nalgebra::DVector::from_row_slice(&[0.0]);
        let w = iim::iim_crb(&model, &q).unwrap();
        let s = ContactScenario::new(w, Vector3::y(), Vector3::new(0.0, -0.2, 0.0)).unwrap();
        assert_relative_eq!(effective_mass(&s), m / 4.0, epsilon = 1e-10);
    }

    #[test]
    fn effective_mass_of_pendulum_gm_is_third_mass() {
        let (m, l) = (2.8, 1.1);
        let model = synth::pendulum(m, l);
        let q = nalgebra::DVector::from_row_slice(&[0.0]);
        let w = iim::iim_gm(&model, &q).unwrap();
        let s = ContactScenario::new(w, Vector3::y(), Vector3::new(0.0, -0.2, 0.0)).unwrap();
        assert_relative_eq!(effective_mass(&s), m / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn scenario_invariants_are_enforced() {
        let w = InverseInertiaMatrix::new(Matrix3::identity(), IimMethod::Gm, "contact");
        // non-unit normal
        assert!(ContactScenario::new(
            w.clone(),
            Vector3::new(0.0, 0.0, 2.0),
            Vector3::new(0.0, 0.0, -0.1)
        )
        .is_err());
        // receding velocity
        assert!(ContactScenario::new(
            w.clone(),
            Vector3::z(),
            Vector3::new(0.0, 0.0, 0.1)
        )
        .is_err());
        // non-positive compliance along the normal
        let w_bad = InverseInertiaMatrix::new(
            Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -0.5)),
            IimMethod::CrbFlex,
            "contact",
        );
        assert!(ContactScenario::new(
            w_bad,
            Vector3::z(),
            Vector3::new(0.0, 0.0, -0.1)
        )
        .is_err());
    }

    #[test]
    fn impulse_is_zero_at_pre_impact_velocity() {
        let s = isotropic_scenario(2.0, -0.1);
        assert_relative_eq!(impulse_for_velocity(&s, -0.1).unwrap(), 0.0);
    }

    #[test]
    fn impulse_matches_hand_arithmetic() {
        // m* = 4 kg, v_pre = -0.1754, v_n = 0 -> 0.7016
        let s = isotropic_scenario(4.0, -0.1754);
        assert_relative_eq!(
            impulse_for_velocity(&s, 0.0).unwrap(),
            0.7016,
            epsilon = 1e-12
        );
    }

    #[test]
    fn impulse_slope_is_effective_mass() {
        let s = isotropic_scenario(3.3, -0.2);
        let eps = 1e-6;
        let slope = (impulse_for_velocity(&s, 0.1 + eps).unwrap()
            - impulse_for_velocity(&s, 0.1).unwrap())
            / eps;
        assert_relative_eq!(slope, effective_mass(&s), epsilon = 1e-6);
        assert!(slope > 0.0);
    }

    #[test]
    fn target_below_pre_impact_is_rejected() {
        let s = isotropic_scenario(2.0, -0.1);
        assert!(matches!(
            impulse_for_velocity(&s, -0.2),
            Err(ImpulseError::InvalidTarget { .. })
        ));
    }

    #[test]
    fn compression_end_impulse_matches_closed_form() {
        let s = isotropic_scenario(2.0, -0.1);
        assert_relative_eq!(compression_end_impulse(&s), 0.2, epsilon = 1e-14);
        // identity p_nc * (n^T W n) == -v_pre
        let w_nn = s.w().along(s.normal());
        assert_relative_eq!(
            compression_end_impulse(&s) * w_nn,
            -s.v_pre_normal(),
            epsilon = 1e-14
        );
        // and it is the impulse that brings the normal velocity to zero
        assert_relative_eq!(
            compression_end_impulse(&s),
            impulse_for_velocity(&s, 0.0).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn restitution_end_impulse_scales_compression_impulse() {
        let s = isotropic_scenario(2.0, -0.1);
        let p_nc = compression_end_impulse(&s);
        assert_relative_eq!(restitution_end_impulse(&s, 0.0).unwrap(), p_nc);
        assert_relative_eq!(restitution_end_impulse(&s, 1.0).unwrap(), 2.0 * p_nc);
        // e_r = 0.627 (drop-test scale), m* = 2, v = -0.1
        assert_relative_eq!(
            restitution_end_impulse(&s, 0.627).unwrap(),
            0.3254,
            epsilon = 1e-12
        );
        assert!(restitution_end_impulse(&s, 1.2).is_err());
    }

    #[test]
    fn zero_impulse_gives_zero_joint_jump() {
        let model = synth::pendulum(1.0, 1.0);
        let q = nalgebra::DVector::from_row_slice(&[0.3]);
        let dq = joint_velocity_jump(&model, &q, &Vector3::zeros()).unwrap();
        assert_relative_eq!(dq.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pendulum_tip_impulse_jump_is_3p_over_ml() {
        let (m, l) = (1.4, 0.9);
        let model = synth::pendulum(m, l);
        let q = nalgebra::DVector::from_row_slice(&[0.0]);
        let p = 0.05;
        let dq = joint_velocity_jump(&model, &q, &Vector3::new(0.0, p, 0.0)).unwrap();
        assert_relative_eq!(dq[0], 3.0 * p / (m * l), epsilon = 1e-12);
    }

    #[test]
    fn joint_jump_round_trips_through_gm() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..8 {
            let n = rng.random_range(3..=7);
            let model = synth::random_chain(&mut rng, n);
            let q = nalgebra::DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let p = Vector3::new(
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
            );
            let dq = joint_velocity_jump(&model, &q, &p).unwrap();
            let jac = model.body_jacobian(&q, JacobianTarget::ContactPoint).unwrap();
            let dv6 = &jac * &dq;
            let dv = Vector3::new(dv6[0], dv6[1], dv6[2]);
            let w = iim::iim_gm(&model, &q).unwrap();
            let expected = w.matrix() * p;
            assert!(
                (dv - expected).norm() < 1e-10 * (1.0 + expected.norm()),
                "jump/IIM mismatch"
            );
        }
    }
}
