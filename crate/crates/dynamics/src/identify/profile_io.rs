//! Force-profile files: a two-column CSV (`time_s,force_n`) plus an optional
//! JSON metadata sidecar carrying the sample rate, commanded velocity, and a
//! condition label.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ForceProfile;
use crate::scalar::Real;

/// Schema version written into profile sidecars.
pub const PROFILE_SCHEMA_VERSION: u32 = 1;

/// Errors from profile file I/O.
#[derive(Debug, thiserror::Error)]
pub enum ProfileIoError {
    #[error("profile file error at `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("profile CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("profile sidecar JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported profile schema_version {found}")]
    UnsupportedVersion { found: u32 },
    #[error("invalid profile data: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProfileRow<T> {
    time_s: T,
    force_n: T,
}

/// JSON metadata sidecar for a profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta<T> {
    pub schema_version: u32,
    pub rate_hz: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_pre: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Sidecar path convention: `<profile>.json` next to `<profile>.csv`.
pub fn sidecar_path(csv_path: impl AsRef<Path>) -> PathBuf {
    csv_path.as_ref().with_extension("json")
}

/// Writes `time_s,force_n` CSV and, when metadata is present, the sidecar.
pub fn write_profile<T: Real + Serialize>(
    profile: &ForceProfile<T>,
    csv_path: impl AsRef<Path>,
) -> Result<(), ProfileIoError> {
    let path = csv_path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| wrap_csv(e, path))?;
    for (t, f) in profile.times().iter().zip(profile.force()) {
        writer.serialize(ProfileRow {
            time_s: *t,
            force_n: *f,
        })?;
    }
    writer.flush().map_err(|source| ProfileIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let meta = ProfileMeta {
        schema_version: PROFILE_SCHEMA_VERSION,
        rate_hz: profile.rate_hz(),
        v_pre: profile.v_pre,
        label: profile.label.clone(),
    };
    let text = serde_json::to_string_pretty(&meta)?;
    std::fs::write(sidecar_path(path), text).map_err(|source| ProfileIoError::Io {
        path: sidecar_path(path).display().to_string(),
        source,
    })?;
    Ok(())
}

/// Reads a profile CSV, picking up `<file>.json` metadata when present.
pub fn read_profile<T: Real + for<'de> Deserialize<'de>>(
    csv_path: impl AsRef<Path>,
) -> Result<ForceProfile<T>, ProfileIoError> {
    let path = csv_path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| wrap_csv(e, path))?;
    let mut times = Vec::new();
    let mut force = Vec::new();
    for row in reader.deserialize() {
        let row: ProfileRow<T> = row?;
        times.push(row.time_s);
        force.push(row.force_n);
    }
    let mut profile =
        ForceProfile::new(times, force).map_err(|e| ProfileIoError::Invalid(e.to_string()))?;

    let sidecar = sidecar_path(path);
    if sidecar.exists() {
        let text = std::fs::read_to_string(&sidecar).map_err(|source| ProfileIoError::Io {
            path: sidecar.display().to_string(),
            source,
        })?;
        let meta: ProfileMeta<T> = serde_json::from_str(&text)?;
        if meta.schema_version != PROFILE_SCHEMA_VERSION {
            return Err(ProfileIoError::UnsupportedVersion {
                found: meta.schema_version,
            });
        }
        profile.v_pre = meta.v_pre;
        profile.label = meta.label;
    }
    Ok(profile)
}

fn wrap_csv(e: csv::Error, path: &Path) -> ProfileIoError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => ProfileIoError::Io {
                path: path.display().to_string(),
                source,
            },
            _ => unreachable!("is_io_error guarantees an Io kind"),
        }
    } else {
        ProfileIoError::Csv(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{simulate, ContactModel};

    #[test]
    fn profile_round_trips_with_metadata() {
        let model = ContactModel::viscoelastic(4e4, 9e5, 2.8).unwrap();
        let trace = simulate(&model, -0.12).unwrap();
        let profile = ForceProfile::from_trace(&trace)
            .unwrap()
            .with_label("config-one");

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile.csv");
        write_profile(&profile, &path).unwrap();
        let back: ForceProfile<f64> = read_profile(&path).unwrap();
        assert_eq!(back, profile);

        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("time_s,force_n\n"));
    }
}
