//! Scenario files and the run summaries the CLI writes.
//!
//! A scenario bundles a chain file, a joint configuration, a commanded
//! contact speed, and a contact-model selection; the functions here turn a
//! loaded scenario into serializable summaries: the four IIM candidates with
//! their effective masses, per-method impulse predictions, a simulated
//! impact, and velocity sweeps. Each emitted format has a reader so files
//! round-trip losslessly.

use std::path::{Path, PathBuf};

use nalgebra::{DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::chain::{file as chain_file, ChainError, ChainModel};
use crate::contact::{
    simulate_with, ContactError, ContactModel, ModelFamily, SimSettings, TraceIoError,
};
use crate::iim::{self, IimError, IimMethod};
use crate::scalar::{lit, Real};

/// Scenario/summary schema version.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Errors from scenario handling and report generation.
#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported scenario schema_version {found}")]
    UnsupportedVersion { found: u32 },
    #[error("invalid scenario: {reason}")]
    Invalid { reason: String },
    #[error("chain file: {0}")]
    ChainFile(#[from] chain_file::ChainFileError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Iim(#[from] IimError),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    TraceIo(#[from] TraceIoError),
    #[error("summary CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("summary JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// How the scenario obtains the effective mass for contact simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MStarSpec {
    /// Compute from the chain along its impact normal with this IIM method.
    Method(IimMethod),
    /// Explicit value in kg.
    Value(f64),
}

impl Default for MStarSpec {
    fn default() -> Self {
        MStarSpec::Method(IimMethod::Crb)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    /// Chain file path, relative to the scenario file.
    chain: String,
    q: Vec<f64>,
    /// Commanded contact speed along the negative impact normal, m/s.
    speed: f64,
    #[serde(default)]
    out_dir: Option<String>,
    #[serde(default)]
    model: Option<ModelSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    family: ModelFamily,
    k: f64,
    #[serde(default)]
    c: Option<f64>,
    #[serde(default)]
    m_star: Option<MStarSpec>,
}

/// A loaded, validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario<T: Real> {
    pub chain_path: PathBuf,
    pub model: ChainModel<T>,
    pub q: DVector<T>,
    /// Commanded speed (positive, directed along the negative normal).
    pub speed: T,
    pub out_dir: Option<PathBuf>,
    pub contact: Option<ContactSelection<T>>,
}

/// Contact-model selection from a scenario file.
#[derive(Debug, Clone)]
pub struct ContactSelection<T: Real> {
    pub family: ModelFamily,
    pub k: T,
    pub c: T,
    pub m_star: MStarSpec,
}

impl<T: Real> Scenario<T> {
    /// Loads and validates a scenario file; the chain path resolves relative
    /// to the scenario's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ReportError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: ScenarioFile = toml::from_str(&text)?;
        if file.schema_version != REPORT_SCHEMA_VERSION {
            return Err(ReportError::UnsupportedVersion {
                found: file.schema_version,
            });
        }
        if !(file.speed > 0.0) {
            return Err(ReportError::Invalid {
                reason: format!("speed must be positive, got {}", file.speed),
            });
        }
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let chain_path = base.join(&file.chain);
        let model = chain_file::load_chain::<T>(&chain_path)?;
        if file.q.len() != model.dof() {
            return Err(ReportError::Invalid {
                reason: format!(
                    "q has {} entries but the chain has {} joints",
                    file.q.len(),
                    model.dof()
                ),
            });
        }
        let contact = match file.model {
            None => None,
            Some(section) => {
                let c = section.c.unwrap_or(0.0);
                if section.family != ModelFamily::Spring && c <= 0.0 {
                    return Err(ReportError::Invalid {
                        reason: "model.c must be positive for maxwell/viscoelastic".into(),
                    });
                }
                Some(ContactSelection {
                    family: section.family,
                    k: lit(section.k),
                    c: lit(c),
                    m_star: section.m_star.unwrap_or_default(),
                })
            }
        };
        Ok(Self {
            chain_path,
            model,
            q: DVector::from_iterator(file.q.len(), file.q.iter().map(|v| lit(*v))),
            speed: lit(file.speed),
            out_dir: file.out_dir.map(|d| base.join(d)),
            contact,
        })
    }

    /// Pre-impact contact velocity vector: `speed` along the negative normal.
    pub fn v_pre(&self) -> Vector3<T> {
        -self.model.normal() * self.speed
    }
}

fn matrix_to_rows<T: Real>(m: &Matrix3<T>) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

/// One IIM candidate in a summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodIim<T> {
    pub method: IimMethod,
    pub matrix: [[T; 3]; 3],
    /// `1 / (n^T W n)` along the chain's impact normal, kg.
    pub effective_mass: T,
}

/// All four IIM candidates at a configuration, with the additive-identity
/// residual between the joint-space candidate and the locked-joint candidate
/// plus its correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IimSummary<T> {
    pub schema_version: u32,
    pub chain: String,
    pub q: Vec<T>,
    pub normal: [T; 3],
    pub methods: Vec<MethodIim<T>>,
    /// Apparent-mass matrix of the classical algebraic route; absent when
    /// the operational inertia is rank deficient (fewer than six joints).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub em_matrix: Option<[[T; 3]; 3]>,
    /// `n^T m_em n`: apparent mass of the classical algebraic route, kg.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub em_normal_mass: Option<T>,
    /// `|W_gm - (W_crb + W_flex)| / |W_gm|` (Frobenius).
    pub identity_residual: T,
}

/// Builds the IIM section: all four candidates, the apparent-mass matrix of
/// the algebraic route, and the additive-identity residual.
pub fn iim_summary<T: Real>(
    model: &ChainModel<T>,
    q: &DVector<T>,
) -> Result<IimSummary<T>, ReportError> {
    let n = model.normal();
    let gm = iim::iim_gm(model, q)?;
    let crb = iim::iim_crb(model, q)?;
    let flex = iim::iim_flex_correction(model, q)?;
    let crb_flex = iim::iim_crb_flex(model, q)?;
    // the classical route needs a full-rank 6x6 operational inertia; report
    // the rest without it when the chain cannot provide one
    let em = match iim::em_matrix(model, q) {
        Ok(m) => Some(m),
        Err(IimError::SingularOperationalInertia { .. }) => None,
        Err(e) => return Err(e.into()),
    };

    let identity_residual =
        (gm.matrix() - (crb.matrix() + flex)).norm() / gm.matrix().norm();

    let mass_along = |w: &Matrix3<T>| T::one() / (w * n).dot(&n);
    let methods = vec![
        MethodIim {
            method: IimMethod::Gm,
            matrix: matrix_to_rows(gm.matrix()),
            effective_mass: mass_along(gm.matrix()),
        },
        MethodIim {
            method: IimMethod::Crb,
            matrix: matrix_to_rows(crb.matrix()),
            effective_mass: mass_along(crb.matrix()),
        },
        MethodIim {
            method: IimMethod::CrbFlex,
            matrix: matrix_to_rows(crb_flex.matrix()),
            effective_mass: mass_along(crb_flex.matrix()),
        },
    ];
    Ok(IimSummary {
        schema_version: REPORT_SCHEMA_VERSION,
        chain: model.name().to_owned(),
        q: q.iter().copied().collect(),
        normal: [n.x, n.y, n.z],
        methods,
        em_matrix: em.as_ref().map(matrix_to_rows),
        em_normal_mass: em.map(|m| (m * n).dot(&n)),
        identity_residual,
    })
}

/// Effective mass along the chain normal for one IIM method.
pub fn effective_mass_for<T: Real>(
    model: &ChainModel<T>,
    q: &DVector<T>,
    method: IimMethod,
) -> Result<T, ReportError> {
    let n = model.normal();
    let w = match method {
        IimMethod::Gm => *iim::iim_gm(model, q)?.matrix(),
        IimMethod::Crb => *iim::iim_crb(model, q)?.matrix(),
        IimMethod::CrbFlex => *iim::iim_crb_flex(model, q)?.matrix(),
        IimMethod::Em => {
            let em = iim::em_matrix(model, q)?;
            return Ok((em * n).dot(&n));
        }
    };
    Ok(T::one() / (w * n).dot(&n))
}

/// Per-velocity impulse predictions of every candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulseRow<T> {
    /// Commanded speed, m/s.
    pub velocity: T,
    /// Compression-end impulse of the joint-space candidate, N s.
    pub p_nc_gm: T,
    /// Compression-end impulse of the locked-joint candidate, N s.
    pub p_nc_crb: T,
    /// Compression-end impulse of the corrected candidate, N s.
    pub p_nc_crb_flex: T,
    /// Restitution-end impulses at the given `e_r`.
    pub p_re_gm: T,
    pub p_re_crb: T,
    pub p_re_crb_flex: T,
    /// Normal impulse magnitude of the classical algebraic equation, N s;
    /// absent for chains with fewer than six joints.
    pub p_algebraic: Option<T>,
    /// Optional measured impulse for comparison, N s.
    pub measured: Option<T>,
}

/// Builds impulse predictions for a list of speeds. `e_r` scales the
/// restitution-end predictions and the algebraic impulse (`e_r = 0` makes
/// the algebraic column directly comparable to compression-end impulses).
pub fn impulse_rows<T: Real>(
    model: &ChainModel<T>,
    q: &DVector<T>,
    speeds: &[T],
    e_r: T,
    measured: Option<&[(T, T)]>,
) -> Result<Vec<ImpulseRow<T>>, ReportError> {
    let n = model.normal();
    let m_gm = effective_mass_for(model, q, IimMethod::Gm)?;
    let m_crb = effective_mass_for(model, q, IimMethod::Crb)?;
    let m_crb_flex = effective_mass_for(model, q, IimMethod::CrbFlex)?;
    let m_em = match iim::em_matrix(model, q) {
        Ok(em) => Some((em * n).dot(&n)),
        Err(IimError::SingularOperationalInertia { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let one_plus = T::one() + e_r;

    let lookup = |speed: T| -> Option<T> {
        measured.and_then(|pairs| {
            pairs
                .iter()
                .min_by(|a, b| {
                    (a.0 - speed)
                        .abs()
                        .partial_cmp(&(b.0 - speed).abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|(v, _)| (*v - speed).abs() <= lit::<T>(1e-6) + speed * lit::<T>(1e-3))
                .map(|(_, p)| *p)
        })
    };

    Ok(speeds
        .iter()
        .map(|&speed| ImpulseRow {
            velocity: speed,
            p_nc_gm: m_gm * speed,
            p_nc_crb: m_crb * speed,
            p_nc_crb_flex: m_crb_flex * speed,
            p_re_gm: one_plus * m_gm * speed,
            p_re_crb: one_plus * m_crb * speed,
            p_re_crb_flex: one_plus * m_crb_flex * speed,
            p_algebraic: m_em.map(|m| one_plus * m * speed),
            measured: lookup(speed),
        })
        .collect())
}

/// Scalar outcome of one simulated impact inside a summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary<T> {
    pub family: ModelFamily,
    pub k: T,
    pub c: T,
    pub m_star: T,
    pub v_pre: T,
    pub cor: T,
    pub duration: T,
    pub t_compression_end: T,
    pub x_end: T,
    pub v_exit: T,
    pub p_nc: T,
    pub p_total: T,
    pub peak_force: T,
    /// Dashpot losses plus stranded potential energy, J.
    pub energy_loss: T,
    pub max_energy_residual: T,
}

/// Simulates one impact and condenses the result.
pub fn simulation_summary<T: Real>(
    contact: &ContactModel<T>,
    v_pre: T,
    settings: &SimSettings<T>,
) -> Result<SimulationSummary<T>, ReportError> {
    let trace = simulate_with(contact, v_pre, settings)?;
    let energy = crate::contact::energy_trace(&trace);
    let end = trace.len() - 1;
    Ok(SimulationSummary {
        family: contact.family,
        k: contact.k,
        c: contact.c,
        m_star: contact.m_star,
        v_pre,
        cor: trace.events.cor,
        duration: trace.events.t_restitution_end,
        t_compression_end: trace.events.t_compression_end,
        x_end: trace.events.x_end,
        v_exit: trace.events.v_exit,
        p_nc: trace.events.p_nc,
        p_total: trace.events.p_total,
        peak_force: trace.events.peak_force,
        energy_loss: energy.e_d[end] + energy.e_p[end],
        max_energy_residual: energy.max_abs_residual,
    })
}

/// One row of a velocity sweep: impulse predictions plus simulated outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T> {
    pub velocity: T,
    pub p_nc_gm: T,
    pub p_nc_crb: T,
    pub p_nc_crb_flex: T,
    pub p_algebraic: Option<T>,
    pub cor: T,
    pub duration: T,
    pub peak_force: T,
    pub energy_loss: T,
}

/// Runs the sweep: per speed, the impulse predictions of every candidate and
/// a simulated impact with the scenario's contact model. Rows keep the input
/// order.
pub fn sweep<T: Real>(
    model: &ChainModel<T>,
    q: &DVector<T>,
    contact: &ContactModel<T>,
    speeds: &[T],
    settings: &SimSettings<T>,
) -> Result<Vec<SweepRow<T>>, ReportError> {
    let rows = impulse_rows(model, q, speeds, T::zero(), None)?;
    rows.into_iter()
        .map(|row| {
            let sim = simulation_summary(contact, -row.velocity, settings)?;
            Ok(SweepRow {
                velocity: row.velocity,
                p_nc_gm: row.p_nc_gm,
                p_nc_crb: row.p_nc_crb,
                p_nc_crb_flex: row.p_nc_crb_flex,
                p_algebraic: row.p_algebraic,
                cor: sim.cor,
                duration: sim.duration,
                peak_force: sim.peak_force,
                energy_loss: sim.energy_loss,
            })
        })
        .collect()
}

/// Resolves the scenario's contact-model selection into a concrete model.
pub fn resolve_contact_model<T: Real>(
    scenario: &Scenario<T>,
) -> Result<Option<ContactModel<T>>, ReportError> {
    let Some(selection) = &scenario.contact else {
        return Ok(None);
    };
    let m_star = match &selection.m_star {
        MStarSpec::Value(v) => lit(*v),
        MStarSpec::Method(method) => {
            effective_mass_for(&scenario.model, &scenario.q, *method)?
        }
    };
    let model =
        ContactModel::with_family(selection.family, selection.k, selection.c, m_star)?;
    Ok(Some(model))
}

/// Writes serializable rows as CSV.
pub fn write_csv_rows<R: Serialize>(
    rows: &[R],
    path: impl AsRef<Path>,
) -> Result<(), ReportError> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|source| ReportError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    Ok(())
}

/// Reads CSV rows written by [`write_csv_rows`].
pub fn read_csv_rows<R: for<'de> Deserialize<'de>>(
    path: impl AsRef<Path>,
) -> Result<Vec<R>, ReportError> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Writes a summary value as pretty JSON.
pub fn write_json<S: Serialize>(value: &S, path: impl AsRef<Path>) -> Result<(), ReportError> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path.as_ref(), text).map_err(|source| ReportError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })
}

/// Reads a JSON summary back.
pub fn read_json<S: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<S, ReportError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|source| ReportError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use approx::assert_relative_eq;

    #[test]
    fn pendulum_iim_summary_has_expected_masses() {
        let (m, l) = (2.0, 1.0);
        let model = synth::pendulum::<f64>(m, l);
        let q = DVector::from_row_slice(&[0.0]);
        let summary = iim_summary(&model, &q).unwrap();
        // a 1-DOF chain has no full-rank operational inertia
        assert!(summary.em_matrix.is_none());
        let mass_of = |method: IimMethod| {
            summary
                .methods
                .iter()
                .find(|e| e.method == method)
                .unwrap()
                .effective_mass
        };
        assert_relative_eq!(mass_of(IimMethod::Gm), m / 3.0, epsilon = 1e-10);
        assert_relative_eq!(mass_of(IimMethod::Crb), m / 4.0, epsilon = 1e-10);
        assert_relative_eq!(mass_of(IimMethod::CrbFlex), m / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn contact_at_com_gives_total_mass() {
        let model = synth::two_point_masses::<f64>(1.2, 1.0);
        // move the contact onto the COM (the world origin at q = 0, which in
        // the link1 frame is also the origin since all offsets are identity)
        let mut contact = model.contact().clone();
        contact.point = nalgebra::Vector3::zeros();
        let model = crate::chain::ChainModel::new(
            "com-contact",
            model.links().to_vec(),
            model.joints().to_vec(),
            contact,
        )
        .unwrap();
        let q = DVector::from_row_slice(&[0.0, 0.0]);
        let crb = effective_mass_for(&model, &q, IimMethod::Crb).unwrap();
        assert_relative_eq!(crb, 2.4, epsilon = 1e-10);
    }

    #[test]
    fn impulse_rows_scale_linearly_and_zero_at_rest() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let model = synth::random_chain::<f64, _>(&mut rng, 7);
        let q = DVector::from_fn(7, |_, _| 0.3);
        let rows = impulse_rows(&model, &q, &[0.0, 0.1, 0.2], 0.0, None).unwrap();
        assert_relative_eq!(rows[0].p_nc_gm, 0.0);
        assert_relative_eq!(rows[0].p_algebraic.unwrap(), 0.0);
        assert_relative_eq!(rows[2].p_nc_crb, 2.0 * rows[1].p_nc_crb, epsilon = 1e-12);
        assert_relative_eq!(
            rows[2].p_algebraic.unwrap(),
            2.0 * rows[1].p_algebraic.unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn sweep_keeps_input_order() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let model = synth::random_chain::<f64, _>(&mut rng, 6);
        let q = DVector::from_fn(6, |_, _| -0.2);
        let contact = ContactModel::viscoelastic(5e4, 1.2e6, 3.0).unwrap();
        let speeds = [0.18, 0.15, 0.12];
        let rows = sweep(&model, &q, &contact, &speeds, &SimSettings::default_settings()).unwrap();
        let velocities: Vec<f64> = rows.iter().map(|r| r.velocity).collect();
        assert_eq!(velocities, speeds.to_vec());
    }

    #[test]
    fn scenario_loads_and_resolves() {
        let dir = tempfile::tempdir().unwrap();
        let chain_path = dir.path().join("pendulum.toml");
        let model = synth::pendulum::<f64>(2.0, 1.0);
        std::fs::write(&chain_path, chain_file::chain_to_toml(&model).unwrap()).unwrap();
        let scenario_path = dir.path().join("scenario.toml");
        std::fs::write(
            &scenario_path,
            r#"
schema_version = 1
chain = "pendulum.toml"
q = [0.0]
speed = 0.1

[model]
family = "viscoelastic"
k = 4.0e4
c = 1.0e6
m_star = "crb"
"#,
        )
        .unwrap();
        let scenario = Scenario::<f64>::load(&scenario_path).unwrap();
        assert_eq!(scenario.model.dof(), 1);
        let contact = resolve_contact_model(&scenario).unwrap().unwrap();
        assert_relative_eq!(contact.m_star, 0.5, epsilon = 1e-10); // m/4
        // v_pre points against the normal
        assert_relative_eq!(
            scenario.v_pre(),
            nalgebra::Vector3::new(0.0, -0.1, 0.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn bad_scenarios_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let chain_path = dir.path().join("pendulum.toml");
        std::fs::write(
            &chain_path,
            chain_file::chain_to_toml(&synth::pendulum::<f64>(1.0, 1.0)).unwrap(),
        )
        .unwrap();
        let write_scenario = |body: &str| {
            let p = dir.path().join("s.toml");
            std::fs::write(&p, body).unwrap();
            Scenario::<f64>::load(&p)
        };
        // zero speed
        assert!(matches!(
            write_scenario("schema_version = 1\nchain = \"pendulum.toml\"\nq = [0.0]\nspeed = 0.0\n"),
            Err(ReportError::Invalid { .. })
        ));
        // wrong q length
        assert!(matches!(
            write_scenario("schema_version = 1\nchain = \"pendulum.toml\"\nq = [0.0, 1.0]\nspeed = 0.1\n"),
            Err(ReportError::Invalid { .. })
        ));
        // unknown field named in the error
        let err = write_scenario(
            "schema_version = 1\nchain = \"pendulum.toml\"\nq = [0.0]\nspeed = 0.1\nspede = 2\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("spede"), "{err}");
        // missing chain file
        assert!(matches!(
            write_scenario("schema_version = 1\nchain = \"nope.toml\"\nq = [0.0]\nspeed = 0.1\n"),
            Err(ReportError::ChainFile(_))
        ));
    }

    #[test]
    fn summary_files_round_trip() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let model = synth::random_chain::<f64, _>(&mut rng, 6);
        let q = DVector::from_fn(6, |_, _| 0.25);
        let summary = iim_summary(&model, &q).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let json_path = dir.path().join("iim.json");
        write_json(&summary, &json_path).unwrap();
        let back: IimSummary<f64> = read_json(&json_path).unwrap();
        assert_eq!(back, summary);

        let contact = ContactModel::viscoelastic(5e4, 1.2e6, 3.0).unwrap();
        let rows = sweep(
            &model,
            &q,
            &contact,
            &[0.08, 0.1],
            &SimSettings::default_settings(),
        )
        .unwrap();
        let csv_path = dir.path().join("sweep.csv");
        write_csv_rows(&rows, &csv_path).unwrap();
        let rows_back: Vec<SweepRow<f64>> = read_csv_rows(&csv_path).unwrap();
        assert_eq!(rows_back, rows);
    }
}
