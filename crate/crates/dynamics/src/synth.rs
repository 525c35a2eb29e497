//! Synthetic chain models for tests, examples, and quick experiments.
//!
//! All builders return fully validated [`ChainModel`]s. The random chains
//! draw physically consistent inertias (each one is assembled from a handful
//! of point masses, so positive semidefiniteness and the triangle inequality
//! hold by construction).

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::{Rng, RngExt};

use crate::chain::{ChainModel, Contact, Joint, JointKind, Link, WORLD_FRAME};
use crate::scalar::{lit, Real};
use crate::spatial::{SpatialInertia, SpatialTransform};

fn unit_vector<T: Real, R: Rng>(rng: &mut R) -> Unit<Vector3<T>> {
    loop {
        let v = Vector3::new(
            lit::<T>(rng.random_range(-1.0..1.0)),
            lit::<T>(rng.random_range(-1.0..1.0)),
            lit::<T>(rng.random_range(-1.0..1.0)),
        );
        if v.norm() > lit(0.2) {
            return Unit::new_normalize(v);
        }
    }
}

/// Uniform slender rod swinging about the world z axis: one revolute joint at
/// the origin, rod of mass `m` and length `l` along +x at zero configuration,
/// contact point at the tip with the impact normal along +y.
pub fn pendulum<T: Real>(m: f64, l: f64) -> ChainModel<T> {
    let m_t = lit::<T>(m);
    let l_t = lit::<T>(l);
    let half = l_t * lit(0.5);
    let i_rod = m_t * l_t * l_t / lit(12.0);
    let inertia = SpatialInertia::from_com_inertia(
        m_t,
        Vector3::new(half, T::zero(), T::zero()),
        Matrix3::from_diagonal(&Vector3::new(T::zero(), i_rod, i_rod)),
        "link0",
    )
    .expect("rod inertia is physical");
    let joint = Joint {
        kind: JointKind::Revolute,
        axis: Unit::new_normalize(Vector3::z()),
        origin: SpatialTransform::identity(WORLD_FRAME),
    };
    let contact = Contact {
        link: 0,
        point: Vector3::new(l_t, T::zero(), T::zero()),
        normal: Unit::new_normalize(Vector3::y()),
    };
    ChainModel::new("pendulum", vec![Link { inertia }], vec![joint], contact)
        .expect("pendulum model is valid")
}

/// Single prismatic joint along +x carrying a point mass `m`; the contact
/// point sits at the mass with the normal along the motion axis.
pub fn slider<T: Real>(m: f64) -> ChainModel<T> {
    let inertia =
        SpatialInertia::point_mass(lit::<T>(m), Vector3::zeros(), "link0").expect("point mass");
    let joint = Joint {
        kind: JointKind::Prismatic,
        axis: Unit::new_normalize(Vector3::x()),
        origin: SpatialTransform::identity(WORLD_FRAME),
    };
    let contact = Contact {
        link: 0,
        point: Vector3::zeros(),
        normal: Unit::new_normalize(Vector3::x()),
    };
    ChainModel::new("slider", vec![Link { inertia }], vec![joint], contact)
        .expect("slider model is valid")
}

/// Two equal point masses of mass `m` at `(+d, 0, 0)` and `(-d, 0, 0)` on two
/// coincident revolute joints; at zero configuration the COM is at the world
/// origin.
pub fn two_point_masses<T: Real>(m: f64, d: f64) -> ChainModel<T> {
    let d_t = lit::<T>(d);
    let links = vec![
        Link {
            inertia: SpatialInertia::point_mass(
                lit::<T>(m),
                Vector3::new(d_t, T::zero(), T::zero()),
                "link0",
            )
            .expect("point mass"),
        },
        Link {
            inertia: SpatialInertia::point_mass(
                lit::<T>(m),
                Vector3::new(-d_t, T::zero(), T::zero()),
                "link1",
            )
            .expect("point mass"),
        },
    ];
    let joints = vec![
        Joint {
            kind: JointKind::Revolute,
            axis: Unit::new_normalize(Vector3::z()),
            origin: SpatialTransform::identity(WORLD_FRAME),
        },
        Joint {
            kind: JointKind::Revolute,
            axis: Unit::new_normalize(Vector3::z()),
            origin: SpatialTransform::identity("link0"),
        },
    ];
    let contact = Contact {
        link: 1,
        point: Vector3::new(-d_t, T::zero(), T::zero()),
        normal: Unit::new_normalize(Vector3::y()),
    };
    ChainModel::new("two-point-masses", links, joints, contact).expect("model is valid")
}

/// A 6-DOF chain (three prismatic, three revolute joints with coincident
/// origins) that behaves like a single free rigid body of mass `m` with the
/// given COM-referenced inertia. The five carrier links get a vanishing mass.
///
/// The contact point sits at `contact_point` (in the body frame) with the
/// given world normal.
pub fn free_body<T: Real>(
    m: f64,
    inertia_about_com: Matrix3<T>,
    contact_point: Vector3<T>,
    normal: Vector3<T>,
) -> ChainModel<T> {
    let eps = lit::<T>(m * 1e-9);
    let axes = [
        Vector3::x(),
        Vector3::y(),
        Vector3::z(),
        Vector3::x(),
        Vector3::y(),
        Vector3::z(),
    ];
    let mut links = Vec::new();
    let mut joints = Vec::new();
    for (i, axis) in axes.iter().enumerate() {
        let kind = if i < 3 {
            JointKind::Prismatic
        } else {
            JointKind::Revolute
        };
        let parent = if i == 0 {
            WORLD_FRAME.to_owned()
        } else {
            format!("link{}", i - 1)
        };
        joints.push(Joint {
            kind,
            axis: Unit::new_normalize(*axis),
            origin: SpatialTransform::identity(parent),
        });
        let inertia = if i + 1 == axes.len() {
            SpatialInertia::from_com_inertia(
                lit::<T>(m),
                Vector3::zeros(),
                inertia_about_com,
                format!("link{i}"),
            )
            .expect("body inertia is physical")
        } else {
            // near-massless carrier
            SpatialInertia::new(
                eps,
                Vector3::zeros(),
                Matrix3::identity() * (eps * lit(1e-4)),
                format!("link{i}"),
            )
            .expect("carrier inertia is physical")
        };
        links.push(Link { inertia });
    }
    let contact = Contact {
        link: 5,
        point: contact_point,
        normal: Unit::new_normalize(normal),
    };
    ChainModel::new("free-body", links, joints, contact).expect("model is valid")
}

/// Random serial chain with `n` joints: mostly revolute with a sprinkling of
/// prismatic joints, random offsets, and physically consistent link inertias.
pub fn random_chain<T: Real, R: Rng>(rng: &mut R, n: usize) -> ChainModel<T> {
    assert!(n >= 1, "chain needs at least one joint");
    let mut links = Vec::with_capacity(n);
    let mut joints = Vec::with_capacity(n);
    for i in 0..n {
        let parent = if i == 0 {
            WORLD_FRAME.to_owned()
        } else {
            format!("link{}", i - 1)
        };
        let rot = Rotation3::from_axis_angle(
            &unit_vector::<T, _>(rng),
            lit::<T>(rng.random_range(-0.6..0.6)),
        )
        .into_inner();
        let trans = Vector3::new(
            lit::<T>(rng.random_range(-0.1..0.35)),
            lit::<T>(rng.random_range(-0.1..0.35)),
            lit::<T>(rng.random_range(0.05..0.35)),
        );
        let origin = SpatialTransform::new(rot, trans, "tmp", parent.clone())
            .expect("random rotation is orthonormal");
        let kind = if rng.random_range(0.0..1.0) < 0.8 {
            JointKind::Revolute
        } else {
            JointKind::Prismatic
        };
        joints.push(Joint {
            kind,
            axis: unit_vector(rng),
            origin,
        });

        let mass = lit::<T>(rng.random_range(0.5..4.0));
        let com = Vector3::new(
            lit::<T>(rng.random_range(-0.08..0.08)),
            lit::<T>(rng.random_range(-0.08..0.08)),
            lit::<T>(rng.random_range(-0.08..0.15)),
        );
        // assemble a physical rotational inertia from point samples around the COM
        let mut i_com = Matrix3::zeros();
        let per_point = mass / lit(6.0);
        for _ in 0..6 {
            let p = Vector3::new(
                lit::<T>(rng.random_range(-0.15..0.15)),
                lit::<T>(rng.random_range(-0.15..0.15)),
                lit::<T>(rng.random_range(-0.15..0.15)),
            );
            i_com += (Matrix3::identity() * p.norm_squared() - p * p.transpose()) * per_point;
        }
        let inertia = SpatialInertia::from_com_inertia(mass, com, i_com, format!("link{i}"))
            .expect("sampled inertia is physical");
        links.push(Link { inertia });
    }
    let contact = Contact {
        link: n - 1,
        point: Vector3::new(
            lit::<T>(rng.random_range(-0.12..0.12)),
            lit::<T>(rng.random_range(-0.12..0.12)),
            lit::<T>(rng.random_range(-0.12..0.12)),
        ),
        normal: unit_vector(rng),
    };
    ChainModel::new(format!("random-{n}dof"), links, joints, contact).expect("model is valid")
}

/// The same chain with its base shifted by `offset` in the world frame.
pub fn translated<T: Real>(model: &ChainModel<T>, offset: Vector3<T>) -> ChainModel<T> {
    let mut joints = model.joints().to_vec();
    let first = &joints[0].origin;
    joints[0].origin = SpatialTransform::new(
        *first.rotation(),
        first.translation() + offset,
        first.from_frame().to_owned(),
        first.to_frame().to_owned(),
    )
    .expect("rotation unchanged");
    ChainModel::new(
        format!("{}-shifted", model.name()),
        model.links().to_vec(),
        joints,
        model.contact().clone(),
    )
    .expect("shifted model is valid")
}
