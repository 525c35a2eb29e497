//! Chain description files.
//!
//! A chain file is TOML with a `schema_version` field, one `[[links]]` table
//! per joint/link pair in base-to-tip order, and a `[contact]` table. All
//! quantities are strict SI (kg, m, kg m^2, radians); there are no unit
//! fields, and unknown keys are rejected outright.
//!
//! ```toml
//! schema_version = 1
//! name = "pendulum"
//!
//! [[links]]
//! name = "rod"
//! mass = 1.0
//! com = [0.5, 0.0, 0.0]
//! # about the COM, in link-frame coordinates: ixx iyy izz ixy ixz iyz
//! inertia = [0.0, 0.0833333, 0.0833333, 0.0, 0.0, 0.0]
//!
//! [links.joint]
//! type = "revolute"            # or "prismatic"
//! axis = [0.0, 0.0, 1.0]       # unit vector in the link frame
//! origin_xyz = [0.0, 0.0, 0.0] # pose of the joint in the parent frame
//! origin_rpy = [0.0, 0.0, 0.0] # roll-pitch-yaw, radians
//!
//! [contact]
//! link = 0
//! point = [1.0, 0.0, 0.0]      # in the contact link frame
//! normal = [0.0, 1.0, 0.0]     # unit vector in the world frame
//! ```

use std::path::Path;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use super::{ChainModel, Contact, Joint, JointKind, Link, WORLD_FRAME};
use crate::scalar::{lit, Real};
use crate::spatial::{SpatialInertia, SpatialTransform};

/// Supported chain file schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Errors from reading, writing, or validating chain files.
#[derive(Debug, thiserror::Error)]
pub enum ChainFileError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("chain file parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("chain file serialize error: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("unsupported schema_version {found} (this build reads version {SCHEMA_VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("invalid chain file: {0}")]
    Invalid(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    links: Vec<LinkEntry>,
    contact: ContactEntry,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    mass: f64,
    com: [f64; 3],
    /// About the COM: ixx, iyy, izz, ixy, ixz, iyz.
    inertia: [f64; 6],
    joint: JointEntry,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointEntry {
    #[serde(rename = "type")]
    kind: String,
    axis: [f64; 3],
    origin_xyz: [f64; 3],
    origin_rpy: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContactEntry {
    link: usize,
    point: [f64; 3],
    normal: [f64; 3],
}

fn v3<T: Real>(a: &[f64; 3]) -> Vector3<T> {
    Vector3::new(lit(a[0]), lit(a[1]), lit(a[2]))
}

fn check_finite(values: &[f64], what: &str) -> Result<(), ChainFileError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ChainFileError::Invalid(format!(
            "{what} contains a non-finite value"
        )));
    }
    Ok(())
}

fn unit_from_file<T: Real>(a: &[f64; 3], what: &str) -> Result<Unit<Vector3<T>>, ChainFileError> {
    check_finite(a, what)?;
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(ChainFileError::Invalid(format!(
            "{what} must be a unit vector (norm {norm})"
        )));
    }
    Ok(Unit::new_normalize(v3(a)))
}

/// Parses a chain model from TOML text.
pub fn parse_chain<T: Real>(text: &str) -> Result<ChainModel<T>, ChainFileError> {
    let file: ChainFile = toml::from_str(text)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(ChainFileError::UnsupportedVersion {
            found: file.schema_version,
        });
    }
    if file.links.is_empty() {
        return Err(ChainFileError::Invalid("chain has no links".into()));
    }

    let mut links = Vec::with_capacity(file.links.len());
    let mut joints = Vec::with_capacity(file.links.len());
    for (i, entry) in file.links.iter().enumerate() {
        check_finite(&[entry.mass], &format!("links[{i}].mass"))?;
        check_finite(&entry.com, &format!("links[{i}].com"))?;
        check_finite(&entry.inertia, &format!("links[{i}].inertia"))?;
        check_finite(&entry.joint.origin_xyz, &format!("links[{i}].joint.origin_xyz"))?;
        check_finite(&entry.joint.origin_rpy, &format!("links[{i}].joint.origin_rpy"))?;

        let [ixx, iyy, izz, ixy, ixz, iyz] = entry.inertia;
        let i_com = Matrix3::new(
            lit(ixx),
            lit(ixy),
            lit(ixz),
            lit(ixy),
            lit(iyy),
            lit(iyz),
            lit(ixz),
            lit(iyz),
            lit(izz),
        );
        let inertia = SpatialInertia::from_com_inertia(
            lit::<T>(entry.mass),
            v3(&entry.com),
            i_com,
            format!("link{i}"),
        )
        .map_err(|e| ChainFileError::Invalid(format!("links[{i}]: {e}")))?;
        links.push(Link { inertia });

        let kind = match entry.joint.kind.as_str() {
            "revolute" => JointKind::Revolute,
            "prismatic" => JointKind::Prismatic,
            other => {
                return Err(ChainFileError::Invalid(format!(
                    "links[{i}].joint.type must be `revolute` or `prismatic`, got `{other}`"
                )))
            }
        };
        let axis = unit_from_file(&entry.joint.axis, &format!("links[{i}].joint.axis"))?;
        let rpy = entry.joint.origin_rpy;
        let rot = Rotation3::from_euler_angles(
            lit::<T>(rpy[0]),
            lit::<T>(rpy[1]),
            lit::<T>(rpy[2]),
        )
        .into_inner();
        let parent = if i == 0 {
            WORLD_FRAME.to_owned()
        } else {
            format!("link{}", i - 1)
        };
        let origin = SpatialTransform::new(rot, v3(&entry.joint.origin_xyz), "tmp", parent)
            .map_err(|e| ChainFileError::Invalid(format!("links[{i}].joint: {e}")))?;
        joints.push(Joint { kind, axis, origin });
    }

    check_finite(&file.contact.point, "contact.point")?;
    let contact = Contact {
        link: file.contact.link,
        point: v3(&file.contact.point),
        normal: unit_from_file(&file.contact.normal, "contact.normal")?,
    };

    ChainModel::new(
        file.name.unwrap_or_else(|| "chain".to_owned()),
        links,
        joints,
        contact,
    )
    .map_err(|e| ChainFileError::Invalid(e.to_string()))
}

/// Loads a chain model from a TOML file on disk.
pub fn load_chain<T: Real>(path: impl AsRef<Path>) -> Result<ChainModel<T>, ChainFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ChainFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_chain(&text)
}

/// Serializes a chain model back to TOML text (used for fixtures and for the
/// round-trip guarantees on emitted files).
pub fn chain_to_toml<T: Real>(model: &ChainModel<T>) -> Result<String, ChainFileError> {
    let as_f64 = |x: T| x.to_subset().expect("scalar converts to f64");
    let links = model
        .links()
        .iter()
        .zip(model.joints())
        .map(|(link, joint)| {
            let com = link.inertia.com_offset();
            let i_com = link.inertia.rotational_inertia_about_com();
            let rot = Rotation3::from_matrix_unchecked(*joint.origin.rotation());
            let (r, p, y) = rot.euler_angles();
            LinkEntry {
                name: None,
                mass: as_f64(link.inertia.mass()),
                com: [as_f64(com.x), as_f64(com.y), as_f64(com.z)],
                inertia: [
                    as_f64(i_com[(0, 0)]),
                    as_f64(i_com[(1, 1)]),
                    as_f64(i_com[(2, 2)]),
                    as_f64(i_com[(0, 1)]),
                    as_f64(i_com[(0, 2)]),
                    as_f64(i_com[(1, 2)]),
                ],
                joint: JointEntry {
                    kind: match joint.kind {
                        JointKind::Revolute => "revolute".into(),
                        JointKind::Prismatic => "prismatic".into(),
                    },
                    axis: [
                        as_f64(joint.axis.x),
                        as_f64(joint.axis.y),
                        as_f64(joint.axis.z),
                    ],
                    origin_xyz: [
                        as_f64(joint.origin.translation().x),
                        as_f64(joint.origin.translation().y),
                        as_f64(joint.origin.translation().z),
                    ],
                    origin_rpy: [as_f64(r), as_f64(p), as_f64(y)],
                },
            }
        })
        .collect();
    let file = ChainFile {
        schema_version: SCHEMA_VERSION,
        name: Some(model.name().to_owned()),
        links,
        contact: ContactEntry {
            link: model.contact().link,
            point: [
                as_f64(model.contact().point.x),
                as_f64(model.contact().point.y),
                as_f64(model.contact().point.z),
            ],
            normal: [
                as_f64(model.contact().normal.x),
                as_f64(model.contact().normal.y),
                as_f64(model.contact().normal.z),
            ],
        },
    };
    Ok(toml::to_string_pretty(&file)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::JacobianTarget;
    use crate::synth;
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::SeedableRng;

    const PENDULUM: &str = r#"
schema_version = 1
name = "pendulum"

[[links]]
mass = 1.0
com = [0.5, 0.0, 0.0]
inertia = [0.0, 0.08333333333333333, 0.08333333333333333, 0.0, 0.0, 0.0]

[links.joint]
type = "revolute"
axis = [0.0, 0.0, 1.0]
origin_xyz = [0.0, 0.0, 0.0]
origin_rpy = [0.0, 0.0, 0.0]

[contact]
link = 0
point = [1.0, 0.0, 0.0]
normal = [0.0, 1.0, 0.0]
"#;

    #[test]
    fn parses_a_pendulum() {
        let model = parse_chain::<f64>(PENDULUM).unwrap();
        assert_eq!(model.dof(), 1);
        let m = model
            .joint_space_inertia(&DVector::from_row_slice(&[0.0]))
            .unwrap();
        assert_relative_eq!(m[(0, 0)], 1.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn unknown_fields_are_rejected_by_name() {
        let text = PENDULUM.replace("[contact]", "angle_unit = \"deg\"\n\n[contact]");
        let err = parse_chain::<f64>(&text).unwrap_err();
        assert!(err.to_string().contains("angle_unit"), "{err}");
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let text = PENDULUM.replace("schema_version = 1", "schema_version = 7");
        assert!(matches!(
            parse_chain::<f64>(&text),
            Err(ChainFileError::UnsupportedVersion { found: 7 })
        ));
    }

    #[test]
    fn non_unit_axis_is_rejected() {
        let text = PENDULUM.replace("axis = [0.0, 0.0, 1.0]", "axis = [0.0, 0.0, 2.0]");
        let err = parse_chain::<f64>(&text).unwrap_err();
        assert!(err.to_string().contains("unit vector"), "{err}");
    }

    #[test]
    fn random_chain_round_trips_through_toml() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let model = synth::random_chain::<f64, _>(&mut rng, 5);
        let text = chain_to_toml(&model).unwrap();
        let restored = parse_chain::<f64>(&text).unwrap();
        let q = DVector::from_fn(5, |i, _| 0.1 * (i as f64 + 1.0));
        let a = model.body_jacobian(&q, JacobianTarget::ContactPoint).unwrap();
        let b = restored
            .body_jacobian(&q, JacobianTarget::ContactPoint)
            .unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-9);
        let ma = model.joint_space_inertia(&q).unwrap();
        let mb = restored.joint_space_inertia(&q).unwrap();
        assert_relative_eq!(ma, mb, epsilon = 1e-9);
    }
}
