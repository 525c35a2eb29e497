//! Serial-chain kinematics and inertia aggregates.
//!
//! A [`ChainModel`] is a fixed-base serial chain: link `i` hangs from link
//! `i-1` through joint `i` (link `-1` being the world). Each joint carries a
//! fixed origin offset followed by a revolute or prismatic motion about/along
//! a unit axis. One contact point with a world-frame unit normal is attached
//! to a designated link.
//!
//! Frame names: the world frame is `"world"`, link frames default to
//! `"link{i}"`, the centroidal frame is `"com"` (world-aligned axes at the
//! instantaneous whole-chain COM) and the contact frame is `"contact"`
//! (world-aligned axes at the contact point).

use nalgebra::{DMatrix, DVector, Dyn, Matrix6, OMatrix, Unit, Vector3, Vector6, U6};

use crate::scalar::{lit, Real};
use crate::spatial::{skew, SpatialError, SpatialInertia, SpatialTransform, Twist};

pub mod file;

/// Name of the fixed world frame.
pub const WORLD_FRAME: &str = "world";
/// Name of the world-aligned centroidal frame.
pub const CENTROIDAL_FRAME: &str = "com";
/// Name of the world-aligned contact frame.
pub const CONTACT_FRAME: &str = "contact";

/// 6-by-n Jacobian (translational rows first).
pub type Jacobian<T> = OMatrix<T, U6, Dyn>;

/// Errors from chain construction and chain-level operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid chain model: {reason}")]
    InvalidModel { reason: String },
    #[error(
        "degenerate contact-velocity ratio: exact normal component {value:e} is below 1e-12"
    )]
    DegenerateRatio { value: f64 },
    #[error(transparent)]
    Spatial(#[from] SpatialError),
}

/// Joint kind for a single degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Prismatic,
}

/// One joint: a fixed offset from the parent link frame followed by the
/// joint motion about/along `axis`.
#[derive(Debug, Clone)]
pub struct Joint<T: Real> {
    pub kind: JointKind,
    pub axis: Unit<Vector3<T>>,
    /// Pose of the joint's zero-configuration frame in the parent link frame.
    pub origin: SpatialTransform<T>,
}

/// One link: its spatial inertia expressed in the link frame.
#[derive(Debug, Clone)]
pub struct Link<T: Real> {
    pub inertia: SpatialInertia<T>,
}

/// Contact point riding on a link, with a world-frame impact normal.
#[derive(Debug, Clone)]
pub struct Contact<T: Real> {
    pub link: usize,
    /// Contact point in the contact link's frame.
    pub point: Vector3<T>,
    /// Unit impact normal, expressed in the world frame.
    pub normal: Unit<Vector3<T>>,
}

/// Fixed-base serial chain with one contact point.
#[derive(Debug, Clone)]
pub struct ChainModel<T: Real> {
    name: String,
    links: Vec<Link<T>>,
    joints: Vec<Joint<T>>,
    contact: Contact<T>,
}

/// Joint positions and velocities for a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState<T: Real> {
    pub q: DVector<T>,
    pub qdot: DVector<T>,
}

impl<T: Real> ChainState<T> {
    pub fn new(q: DVector<T>, qdot: DVector<T>) -> Result<Self, ChainError> {
        if q.len() != qdot.len() {
            return Err(ChainError::DimensionMismatch {
                expected: q.len(),
                found: qdot.len(),
            });
        }
        Ok(Self { q, qdot })
    }
}

/// World poses of every link frame and of the contact frame.
#[derive(Debug, Clone)]
pub struct ChainPoses<T: Real> {
    /// `links[i]`: transform from `link{i}` to `world`.
    pub links: Vec<SpatialTransform<T>>,
    /// Transform from `contact` to `world` (world-aligned axes).
    pub contact: SpatialTransform<T>,
}

/// Which frame a body Jacobian is taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianTarget {
    Link(usize),
    ContactPoint,
}

/// Aggregate state of the chain seen as one composite body.
#[derive(Debug, Clone)]
pub struct CentroidalState<T: Real> {
    /// Transform from `world` to `com` (the centroidal frame keeps
    /// world-aligned axes, so this is a pure translation).
    pub com_transform: SpatialTransform<T>,
    /// 6-by-6 composite-rigid-body inertia in the centroidal frame.
    pub crb_inertia: Matrix6<T>,
    /// Aggregate momentum `[linear; angular]` in the centroidal frame.
    pub momentum: Vector6<T>,
    /// Total mass.
    pub total_mass: T,
}

/// Exact and locked-joint contact velocities, their mismatch, and the
/// normal-direction ratio between them.
#[derive(Debug, Clone)]
pub struct VelocityDecomposition<T: Real> {
    /// Exact contact-frame twist of the contact link.
    pub exact: Twist<T>,
    /// Locked-joint approximation: the average (centroidal) twist transported
    /// to the contact frame.
    pub approx: Twist<T>,
    /// `exact - approx`, the twist the locked-joint view cannot see.
    pub relative: Twist<T>,
    /// Normal component of `approx.linear` over normal component of
    /// `exact.linear`.
    pub normal_ratio: T,
    /// Auxiliary: `|approx.linear| / |exact.linear|`.
    pub norm_ratio: T,
}

impl<T: Real> ChainModel<T> {
    /// Validates and builds a chain. `links` and `joints` must pair up
    /// one-to-one in base-to-tip order.
    pub fn new(
        name: impl Into<String>,
        links: Vec<Link<T>>,
        joints: Vec<Joint<T>>,
        contact: Contact<T>,
    ) -> Result<Self, ChainError> {
        let invalid = |reason: String| ChainError::InvalidModel { reason };
        if links.is_empty() {
            return Err(invalid("chain must have at least one link".into()));
        }
        if links.len() != joints.len() {
            return Err(invalid(format!(
                "links ({}) and joints ({}) must pair up",
                links.len(),
                joints.len()
            )));
        }
        if contact.link >= links.len() {
            return Err(invalid(format!(
                "contact link index {} out of range (chain has {} links)",
                contact.link,
                links.len()
            )));
        }
        let unit_tol = lit::<T>(1e-12).max(T::epsilon() * lit(8.0));
        for (i, joint) in joints.iter().enumerate() {
            let n = joint.axis.as_ref().norm();
            if (n - T::one()).abs() > unit_tol {
                return Err(invalid(format!("joint {i} axis is not unit length")));
            }
        }
        let n = contact.normal.as_ref().norm();
        if (n - T::one()).abs() > unit_tol {
            return Err(invalid("contact normal is not unit length".into()));
        }
        Ok(Self {
            name: name.into(),
            links,
            joints,
            contact,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of joints (= number of links).
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn links(&self) -> &[Link<T>] {
        &self.links
    }

    pub fn joints(&self) -> &[Joint<T>] {
        &self.joints
    }

    pub fn contact(&self) -> &Contact<T> {
        &self.contact
    }

    /// Impact normal as a plain vector.
    pub fn normal(&self) -> Vector3<T> {
        self.contact.normal.into_inner()
    }

    fn link_frame(&self, i: usize) -> String {
        format!("link{i}")
    }

    fn check_dim(&self, len: usize) -> Result<(), ChainError> {
        if len != self.dof() {
            return Err(ChainError::DimensionMismatch {
                expected: self.dof(),
                found: len,
            });
        }
        Ok(())
    }

    fn joint_motion(&self, i: usize, q_i: T) -> SpatialTransform<T> {
        let joint = &self.joints[i];
        let zero_frame = format!("link{i}:zero");
        match joint.kind {
            JointKind::Revolute => {
                let rot = nalgebra::Rotation3::from_axis_angle(&joint.axis, q_i).into_inner();
                SpatialTransform::new(rot, Vector3::zeros(), self.link_frame(i), zero_frame)
                    .expect("rotation from axis-angle is orthonormal")
            }
            JointKind::Prismatic => SpatialTransform::translation_only(
                joint.axis.into_inner() * q_i,
                self.link_frame(i),
                zero_frame,
            ),
        }
    }

    /// Unit joint screw of joint `i` in its own link frame, `[v; w]` layout.
    fn joint_screw(&self, i: usize) -> Vector6<T> {
        let mut s = Vector6::zeros();
        match self.joints[i].kind {
            JointKind::Revolute => s
                .fixed_rows_mut::<3>(3)
                .copy_from(self.joints[i].axis.as_ref()),
            JointKind::Prismatic => s
                .fixed_rows_mut::<3>(0)
                .copy_from(self.joints[i].axis.as_ref()),
        }
        s
    }

    /// World pose of every link frame and of the contact frame.
    pub fn forward_kinematics(&self, q: &DVector<T>) -> Result<ChainPoses<T>, ChainError> {
        self.check_dim(q.len())?;
        let mut links = Vec::with_capacity(self.dof());
        let mut world: SpatialTransform<T> = SpatialTransform::identity(WORLD_FRAME);
        for i in 0..self.dof() {
            // X_world_i = X_world_{i-1} ∘ origin_i ∘ motion_i(q_i)
            let origin = self
                .joints[i]
                .origin
                .clone()
                .with_frames(format!("link{i}:zero"), world.from_frame().to_owned());
            let step = origin.compose(&self.joint_motion(i, q[i]))?;
            world = world.compose(&step)?;
            links.push(world.clone().with_frames(self.link_frame(i), WORLD_FRAME));
        }
        let p_world = links[self.contact.link].transform_point(&self.contact.point);
        let contact = SpatialTransform::translation_only(p_world, CONTACT_FRAME, WORLD_FRAME);
        Ok(ChainPoses { links, contact })
    }

    /// World position of the contact point.
    pub fn contact_point_world(&self, q: &DVector<T>) -> Result<Vector3<T>, ChainError> {
        Ok(*self.forward_kinematics(q)?.contact.translation())
    }

    fn target_pose<'a>(
        &self,
        poses: &'a ChainPoses<T>,
        target: JacobianTarget,
    ) -> Result<(&'a SpatialTransform<T>, usize), ChainError> {
        match target {
            JacobianTarget::Link(i) => {
                if i >= self.dof() {
                    return Err(ChainError::InvalidModel {
                        reason: format!("jacobian target link {i} out of range"),
                    });
                }
                Ok((&poses.links[i], i))
            }
            JacobianTarget::ContactPoint => Ok((&poses.contact, self.contact.link)),
        }
    }

    /// Body Jacobian of the target frame: maps `qdot` to the target's twist
    /// expressed in the target frame. Columns of joints beyond the support
    /// path are zero.
    pub fn body_jacobian(
        &self,
        q: &DVector<T>,
        target: JacobianTarget,
    ) -> Result<Jacobian<T>, ChainError> {
        let poses = self.forward_kinematics(q)?;
        self.body_jacobian_with(&poses, target)
    }

    fn body_jacobian_with(
        &self,
        poses: &ChainPoses<T>,
        target: JacobianTarget,
    ) -> Result<Jacobian<T>, ChainError> {
        let (pose, last) = self.target_pose(poses, target)?;
        let inv_target = pose.invert();
        let mut jac = Jacobian::zeros(self.dof());
        for j in 0..=last {
            let to_target = inv_target.compose(&poses.links[j])?;
            let col = to_target.adjoint_matrix() * self.joint_screw(j);
            jac.column_mut(j).copy_from(&col);
        }
        Ok(jac)
    }

    /// Joint-space inertia matrix by the composite-rigid-body recursion.
    pub fn joint_space_inertia(&self, q: &DVector<T>) -> Result<DMatrix<T>, ChainError> {
        let poses = self.forward_kinematics(q)?;
        let n = self.dof();
        // composite inertia of the subtree rooted at each link, in that link's frame
        let mut composite: Vec<SpatialInertia<T>> =
            self.links.iter().map(|l| l.inertia.clone()).collect();
        for k in (1..n).rev() {
            let to_parent = poses.links[k - 1].invert().compose(&poses.links[k])?;
            let moved = to_parent.transform_inertia(&composite[k])?;
            composite[k - 1] = composite[k - 1].add(&moved)?;
        }
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut f = composite[j].to_matrix() * self.joint_screw(j);
            m[(j, j)] = self.joint_screw(j).dot(&f);
            for i in (0..j).rev() {
                let step = poses.links[i].invert().compose(&poses.links[i + 1])?;
                f = step.wrench_transform_matrix() * f;
                let entry = self.joint_screw(i).dot(&f);
                m[(i, j)] = entry;
                m[(j, i)] = entry;
            }
        }
        Ok(m)
    }

    /// Centroidal momentum matrix: maps `qdot` to the aggregate momentum in
    /// the centroidal frame.
    pub fn centroidal_momentum_matrix(&self, q: &DVector<T>) -> Result<Jacobian<T>, ChainError> {
        let poses = self.forward_kinematics(q)?;
        let com_from_world = self.com_transform_with(&poses)?;
        self.centroidal_momentum_matrix_with(&poses, &com_from_world)
    }

    fn com_transform_with(
        &self,
        poses: &ChainPoses<T>,
    ) -> Result<SpatialTransform<T>, ChainError> {
        let mut total = T::zero();
        let mut weighted = Vector3::zeros();
        for (link, pose) in self.links.iter().zip(&poses.links) {
            let com_w = pose.transform_point(link.inertia.com_offset());
            weighted += com_w * link.inertia.mass();
            total += link.inertia.mass();
        }
        let com = weighted / total;
        // world -> com: pure translation by -com, world-aligned axes
        Ok(SpatialTransform::translation_only(-com, WORLD_FRAME, CENTROIDAL_FRAME))
    }

    fn centroidal_momentum_matrix_with(
        &self,
        poses: &ChainPoses<T>,
        com_from_world: &SpatialTransform<T>,
    ) -> Result<Jacobian<T>, ChainError> {
        let n = self.dof();
        let mut a = Jacobian::zeros(n);
        for i in 0..n {
            let link_to_com = com_from_world.compose(&poses.links[i])?;
            let transport = link_to_com.wrench_transform_matrix();
            let ji = self.body_jacobian_with(poses, JacobianTarget::Link(i))?;
            let contrib = transport * (self.links[i].inertia.to_matrix() * ji);
            a += contrib;
        }
        Ok(a)
    }

    /// COM transform, CRB inertia, and aggregate momentum at the given state.
    pub fn centroidal_state(&self, state: &ChainState<T>) -> Result<CentroidalState<T>, ChainError> {
        self.check_dim(state.q.len())?;
        let poses = self.forward_kinematics(&state.q)?;
        let com_from_world = self.com_transform_with(&poses)?;

        let mut crb: Option<SpatialInertia<T>> = None;
        for (i, link) in self.links.iter().enumerate() {
            let link_to_com = com_from_world.compose(&poses.links[i])?;
            let moved = link_to_com.transform_inertia(&link.inertia)?;
            crb = Some(match crb {
                None => moved,
                Some(acc) => acc.add(&moved)?,
            });
        }
        let crb = crb.expect("chain has at least one link");

        let a = self.centroidal_momentum_matrix_with(&poses, &com_from_world)?;
        let momentum = &a * &state.qdot;

        Ok(CentroidalState {
            com_transform: com_from_world,
            crb_inertia: crb.to_matrix(),
            momentum,
            total_mass: crb.mass(),
        })
    }

    /// Relative contact Jacobian: maps `qdot` to the contact twist left over
    /// after subtracting the transported average (centroidal) twist,
    /// `J_rel = J_contact - Ad * I_crb^-1 * A`.
    pub fn relative_contact_jacobian(&self, q: &DVector<T>) -> Result<Jacobian<T>, ChainError> {
        let parts = self.decomposition_parts(q)?;
        Ok(parts.relative_jacobian)
    }

    /// Splits the exact contact velocity into the locked-joint part and the
    /// joint-induced remainder, and forms the normal-direction ratio.
    pub fn velocity_decomposition(
        &self,
        state: &ChainState<T>,
    ) -> Result<VelocityDecomposition<T>, ChainError> {
        self.check_dim(state.q.len())?;
        let parts = self.decomposition_parts(&state.q)?;
        let exact = Twist::from_vector(&(&parts.contact_jacobian * &state.qdot), CONTACT_FRAME);
        let approx = Twist::from_vector(
            &(&parts.locked_jacobian * &state.qdot),
            CONTACT_FRAME,
        );
        let relative = Twist::from_vector(&(&parts.relative_jacobian * &state.qdot), CONTACT_FRAME);

        let n = self.normal();
        let exact_n = n.dot(&exact.linear);
        if exact_n.abs() < lit(1e-12) {
            return Err(ChainError::DegenerateRatio {
                value: exact_n.to_subset().unwrap_or(f64::NAN),
            });
        }
        let normal_ratio = n.dot(&approx.linear) / exact_n;
        let exact_norm = exact.linear.norm();
        let norm_ratio = if exact_norm > T::zero() {
            approx.linear.norm() / exact_norm
        } else {
            T::zero()
        };
        Ok(VelocityDecomposition {
            exact,
            approx,
            relative,
            normal_ratio,
            norm_ratio,
        })
    }

    pub(crate) fn decomposition_parts(
        &self,
        q: &DVector<T>,
    ) -> Result<DecompositionParts<T>, ChainError> {
        self.check_dim(q.len())?;
        let poses = self.forward_kinematics(q)?;
        let com_from_world = self.com_transform_with(&poses)?;
        let contact_jacobian = self.body_jacobian_with(&poses, JacobianTarget::ContactPoint)?;

        let mut crb: Option<SpatialInertia<T>> = None;
        for (i, link) in self.links.iter().enumerate() {
            let link_to_com = com_from_world.compose(&poses.links[i])?;
            let moved = link_to_com.transform_inertia(&link.inertia)?;
            crb = Some(match crb {
                None => moved,
                Some(acc) => acc.add(&moved)?,
            });
        }
        let crb = crb.expect("chain has at least one link");
        let crb_matrix = crb.to_matrix();
        let a = self.centroidal_momentum_matrix_with(&poses, &com_from_world)?;

        // com -> contact transform (both world-aligned)
        let com_to_contact = poses.contact.invert().compose(&com_from_world.invert())?;
        let ad = com_to_contact.adjoint_matrix();

        // Invert blockwise about the COM. The rotational block gets a
        // pseudo-inverse: idealized bodies (slender rods, point-mass pairs)
        // carry a zero principal moment, and no physical motion ever puts
        // momentum into that null direction.
        let i_g = crb_rotational_about_com(&crb_matrix, crb.mass());
        let i_g_inv = pseudo_inverse_spd(&i_g);
        let mut crb_inv = Matrix6::zeros();
        crb_inv
            .fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(nalgebra::Matrix3::identity() / crb.mass()));
        crb_inv.fixed_view_mut::<3, 3>(3, 3).copy_from(&i_g_inv);
        let centroidal_jacobian = crb_inv * a;
        let locked_jacobian = ad * &centroidal_jacobian;
        let relative_jacobian = &contact_jacobian - &locked_jacobian;
        Ok(DecompositionParts {
            contact_jacobian,
            locked_jacobian,
            relative_jacobian,
            com_to_contact,
            crb_matrix,
            crb_inverse: crb_inv,
            total_mass: crb.mass(),
        })
    }
}

/// Rotational block of a centroidal 6x6 inertia, reduced about the COM.
/// The aggregate's COM offset in the centroidal frame is pure rounding
/// noise; the parallel-axis remainder it induces is removed here.
fn crb_rotational_about_com<T: Real>(crb: &Matrix6<T>, total_mass: T) -> nalgebra::Matrix3<T> {
    let i_o: nalgebra::Matrix3<T> = crb.fixed_view::<3, 3>(3, 3).into();
    let mc: nalgebra::Matrix3<T> = crb.fixed_view::<3, 3>(3, 0).into();
    let c = Vector3::new(mc[(2, 1)], mc[(0, 2)], mc[(1, 0)]) / total_mass;
    let s = skew(&c);
    i_o - s.transpose() * s * total_mass
}

/// Pseudo-inverse of a symmetric positive-semidefinite 3x3 matrix;
/// eigenvalues below `1e-12` of the largest are treated as exact zeros.
pub(crate) fn pseudo_inverse_spd<T: Real>(m: &nalgebra::Matrix3<T>) -> nalgebra::Matrix3<T> {
    let eig = nalgebra::SymmetricEigen::new(*m);
    let max = eig.eigenvalues.iter().fold(T::zero(), |a, b| a.max(*b));
    let cutoff = max * lit(1e-12);
    let mut out = nalgebra::Matrix3::zeros();
    for i in 0..3 {
        let lambda = eig.eigenvalues[i];
        if lambda > cutoff {
            let v = eig.eigenvectors.column(i);
            out += v * v.transpose() / lambda;
        }
    }
    out
}

/// Cached intermediates shared by the decomposition and the IIM candidates.
pub(crate) struct DecompositionParts<T: Real> {
    pub contact_jacobian: Jacobian<T>,
    pub locked_jacobian: Jacobian<T>,
    pub relative_jacobian: Jacobian<T>,
    pub com_to_contact: SpatialTransform<T>,
    pub crb_matrix: Matrix6<T>,
    /// Blockwise (pseudo-)inverse of `crb_matrix` about the COM.
    pub crb_inverse: Matrix6<T>,
    pub total_mass: T,
}

impl<T: Real> DecompositionParts<T> {
    /// Rotational block of the CRB inertia about the COM.
    pub fn crb_rotational(&self) -> nalgebra::Matrix3<T> {
        crb_rotational_about_com(&self.crb_matrix, self.total_mass)
    }
}
