//! Candidate inverse inertia matrices (IIMs) at the contact point.
//!
//! An IIM is the symmetric 3-by-3 map `W` from a contact impulse to the jump
//! of the contact-point linear velocity, `dv = W p`, expressed in the
//! world-aligned contact frame. Four candidates are built here:
//!
//! * [`iim_gm`] — joint-space route: the translational block of
//!   `J M^-1 J^T` with `J` the contact body Jacobian;
//! * [`em_matrix`] / [`algebraic_impulse`] — the classical route that inverts
//!   the full 6-by-6 operational inertia first and reads the translational
//!   block of the inverse (an apparent *mass*, not an inverse inertia);
//! * [`iim_crb`] — locked-joint route: the whole chain is frozen into one
//!   composite rigid body whose inertia is transported to the contact point;
//! * [`iim_crb_flex`] — the locked-joint matrix plus the correction
//!   [`iim_flex_correction`] that restores the joint-induced share of the
//!   contact response, so that `W_crb + W_flex` reproduces `W_gm`.

use nalgebra::{Matrix3, Matrix6, Vector3};
use serde::{Deserialize, Serialize};

use crate::chain::{ChainError, ChainModel, CONTACT_FRAME};
use crate::scalar::{lit, Real};

/// Errors from IIM construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IimError {
    /// The joint-space inertia matrix could not be factorized.
    #[error("singular joint-space inertia matrix")]
    SingularInertia,
    /// The 6-by-6 operational inertia is rank deficient (fewer than six
    /// joints, or a kinematic singularity).
    #[error("singular operational-space inertia: {reason}")]
    SingularOperationalInertia { reason: String },
    /// Restitution coefficient outside `[0, 1]`.
    #[error("coefficient of restitution {value} outside [0, 1]")]
    RestitutionOutOfRange { value: f64 },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Which construction produced an IIM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IimMethod {
    /// Generalized-momentum (joint-space) route.
    Gm,
    /// Operational-space apparent mass (the classical algebraic-equation route).
    Em,
    /// Composite-rigid-body, locked joints.
    Crb,
    /// Composite-rigid-body plus joint-flexibility correction.
    CrbFlex,
}

impl IimMethod {
    pub fn tag(self) -> &'static str {
        match self {
            IimMethod::Gm => "gm",
            IimMethod::Em => "em",
            IimMethod::Crb => "crb",
            IimMethod::CrbFlex => "crb_flex",
        }
    }
}

impl std::fmt::Display for IimMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A 3-by-3 inverse inertia matrix tagged with its construction method and
/// the frame it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseInertiaMatrix<T: Real> {
    matrix: Matrix3<T>,
    method: IimMethod,
    frame: String,
}

impl<T: Real> InverseInertiaMatrix<T> {
    pub fn new(matrix: Matrix3<T>, method: IimMethod, frame: impl Into<String>) -> Self {
        Self {
            matrix,
            method,
            frame: frame.into(),
        }
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.matrix
    }

    pub fn method(&self) -> IimMethod {
        self.method
    }

    pub fn frame(&self) -> &str {
        &self.frame
    }

    /// `n^T W n` for a unit direction `n`.
    pub fn along(&self, n: &Vector3<T>) -> T {
        (self.matrix * n).dot(n)
    }
}

fn translational_block<T: Real>(m: &Matrix6<T>) -> Matrix3<T> {
    m.fixed_view::<3, 3>(0, 0).into()
}

/// Contact body Jacobian times `M^-1` times its transpose (6-by-6), the
/// operational-space inverse inertia shared by several candidates.
fn operational_inverse_inertia<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
) -> Result<Matrix6<T>, IimError> {
    let jac = model.body_jacobian(q, crate::chain::JacobianTarget::ContactPoint)?;
    let m = model.joint_space_inertia(q)?;
    let chol = m.cholesky().ok_or(IimError::SingularInertia)?;
    let minv_jt = chol.solve(&jac.transpose());
    Ok(&jac * minv_jt)
}

/// Generalized-momentum IIM: translational block of `J M^-1 J^T`.
pub fn iim_gm<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
) -> Result<InverseInertiaMatrix<T>, IimError> {
    let w6 = operational_inverse_inertia(model, q)?;
    Ok(InverseInertiaMatrix::new(
        translational_block(&w6),
        IimMethod::Gm,
        CONTACT_FRAME,
    ))
}

/// Apparent contact mass of the classical algebraic route: the translational
/// block of `(J M^-1 J^T)^-1` (the block of the inverse, not the inverse of
/// the block).
///
/// Fails with [`IimError::SingularOperationalInertia`] when the 6-by-6
/// operational inertia is rank deficient (`n < 6` or a singular
/// configuration); [`em_matrix_with`] can fall back to the pseudo-inverse.
pub fn em_matrix<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
) -> Result<Matrix3<T>, IimError> {
    em_matrix_with(model, q, false)
}

/// [`em_matrix`] with an explicit opt-in to a pseudo-inverse fallback for
/// rank-deficient operational inertias.
pub fn em_matrix_with<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
    allow_pseudo_inverse: bool,
) -> Result<Matrix3<T>, IimError> {
    if model.dof() < 6 && !allow_pseudo_inverse {
        return Err(IimError::SingularOperationalInertia {
            reason: format!("chain has {} < 6 joints", model.dof()),
        });
    }
    let w6 = operational_inverse_inertia(model, q)?;
    let svd = nalgebra::SVD::new(w6, true, true);
    let sv = &svd.singular_values;
    let max_sv = sv.max();
    let cutoff = max_sv * lit(1e-12);
    let deficient = sv.iter().any(|s| *s <= cutoff);
    if deficient && !allow_pseudo_inverse {
        return Err(IimError::SingularOperationalInertia {
            reason: "operational inverse inertia is rank deficient".into(),
        });
    }
    let inv = svd
        .pseudo_inverse(cutoff)
        .map_err(|e| IimError::SingularOperationalInertia { reason: e.into() })?;
    Ok(translational_block(&inv))
}

/// Classical algebraic-equation impulse `p = (1 + e_r) m_em v_pre`, kept
/// sign-for-sign with the pre-impact contact velocity.
pub fn algebraic_impulse<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
    v_pre: &Vector3<T>,
    e_r: T,
) -> Result<Vector3<T>, IimError> {
    if e_r < T::zero() || e_r > T::one() {
        return Err(IimError::RestitutionOutOfRange {
            value: e_r.to_subset().unwrap_or(f64::NAN),
        });
    }
    let m_em = em_matrix(model, q)?;
    Ok(m_em * v_pre * (T::one() + e_r))
}

/// Locked-joint IIM: the composite-rigid-body inertia transported to the
/// contact point,
/// `W = I/m - R^T [t]x I_crb^-1 [t]x R`
/// with `t` the contact point in the centroidal frame and `R` the
/// centroidal-to-contact rotation (identity here, both frames being
/// world-aligned).
pub fn iim_crb<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
) -> Result<InverseInertiaMatrix<T>, IimError> {
    let parts = model.decomposition_parts(q)?;
    let i_crb = parts.crb_rotational();
    // pseudo-inverse: a zero principal moment (idealized rod) never couples
    // into the sandwich below, because [t]x annihilates its own axis
    let i_inv = crate::chain::pseudo_inverse_spd(&i_crb);
    // contact origin in the centroidal frame
    let t = *parts.com_to_contact.invert().translation();
    let r = *parts.com_to_contact.rotation();
    let s = crate::spatial::skew(&t);
    let w = Matrix3::identity() / parts.total_mass - r.transpose() * s * i_inv * s * r;
    Ok(InverseInertiaMatrix::new(w, IimMethod::Crb, CONTACT_FRAME))
}

/// The locked-joint IIM computed through the full 6-by-6 transport
/// `Ad I_crb^-1 Ad^*` instead of the closed form used by [`iim_crb`].
/// The two agree to machine precision; this route exists as an independent
/// cross-check and feeds [`iim_flex_correction`].
pub fn iim_crb_transport<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
) -> Result<Matrix3<T>, IimError> {
    let parts = model.decomposition_parts(q)?;
    let ad = parts.com_to_contact.adjoint_matrix();
    Ok(translational_block(
        &(ad * parts.crb_inverse * ad.transpose()),
    ))
}

/// Joint-flexibility correction: the part of the articulated contact
/// response that the locked-joint composite body cannot produce. Adding it
/// to the locked-joint matrix restores the full joint-space response:
/// `W_crb + W_flex == W_gm`.
///
/// The correction is signed and, unlike the other candidates, carries no
/// definiteness guarantee of its own.
pub fn iim_flex_correction<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
) -> Result<Matrix3<T>, IimError> {
    let articulated = translational_block(&operational_inverse_inertia(model, q)?);
    let locked = iim_crb_transport(model, q)?;
    Ok(articulated - locked)
}

/// Locked-joint IIM plus the flexibility correction.
pub fn iim_crb_flex<T: Real>(
    model: &ChainModel<T>,
    q: &nalgebra::DVector<T>,
) -> Result<InverseInertiaMatrix<T>, IimError> {
    let crb = iim_crb(model, q)?;
    let correction = iim_flex_correction(model, q)?;
    Ok(InverseInertiaMatrix::new(
        crb.matrix() + correction,
        IimMethod::CrbFlex,
        CONTACT_FRAME,
    ))
}
