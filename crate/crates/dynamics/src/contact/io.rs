//! Trace export: CSV columns plus a JSON sidecar with events and summary
//! scalars. Both formats round-trip losslessly through their readers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ContactModel, ImpactEvents, ImpactTrace, ModelFamily};
use crate::scalar::Real;

/// Schema version written into trace sidecars.
pub const TRACE_SCHEMA_VERSION: u32 = 1;

/// Errors from trace file I/O.
#[derive(Debug, thiserror::Error)]
pub enum TraceIoError {
    #[error("trace file error at `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("trace CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace sidecar JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported trace schema_version {found}")]
    UnsupportedVersion { found: u32 },
}

/// One CSV row of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow<T> {
    pub time: T,
    pub x: T,
    pub xdot: T,
    pub f_n: T,
    pub p_n: T,
    #[serde(rename = "E_k")]
    pub e_k: T,
    #[serde(rename = "E_p")]
    pub e_p: T,
    #[serde(rename = "E_d")]
    pub e_d: T,
}

/// JSON sidecar: model parameters, events, and summary scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary<T: Real> {
    pub schema_version: u32,
    pub family: ModelFamily,
    pub k: T,
    pub c: T,
    pub m_star: T,
    pub v_pre: T,
    pub events: ImpactEvents<T>,
    pub initial_energy: T,
    /// Energy lost to the dashpot plus energy still stored at detachment.
    pub energy_loss: T,
    pub max_energy_residual: T,
}

impl<T: Real> TraceSummary<T> {
    pub fn from_trace(trace: &ImpactTrace<T>) -> Self {
        let energy = super::energy_trace(trace);
        let end = trace.len() - 1;
        Self {
            schema_version: TRACE_SCHEMA_VERSION,
            family: trace.model.family,
            k: trace.model.k,
            c: trace.model.c,
            m_star: trace.model.m_star,
            v_pre: trace.v_pre,
            events: trace.events,
            initial_energy: energy.initial_energy,
            energy_loss: energy.e_d[end] + energy.e_p[end],
            max_energy_residual: energy.max_abs_residual,
        }
    }
}

/// Writes the trace columns as CSV (`time,x,xdot,f_n,p_n,E_k,E_p,E_d`).
pub fn write_trace_csv<T: Real + Serialize>(
    trace: &ImpactTrace<T>,
    path: impl AsRef<Path>,
) -> Result<(), TraceIoError> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(csv_io(path.as_ref()))?;
    for i in 0..trace.len() {
        writer.serialize(TraceRow {
            time: trace.time[i],
            x: trace.x[i],
            xdot: trace.xdot[i],
            f_n: trace.f_n[i],
            p_n: trace.p_n[i],
            e_k: trace.e_k[i],
            e_p: trace.e_p[i],
            e_d: trace.e_d[i],
        })?;
    }
    writer.flush().map_err(|source| TraceIoError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    Ok(())
}

/// Reads trace rows back from CSV.
pub fn read_trace_csv<T: Real + for<'de> Deserialize<'de>>(
    path: impl AsRef<Path>,
) -> Result<Vec<TraceRow<T>>, TraceIoError> {
    let mut reader = csv::Reader::from_path(path.as_ref()).map_err(csv_io(path.as_ref()))?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Writes the events/summary sidecar as pretty JSON.
pub fn write_trace_summary<T: Real + Serialize>(
    summary: &TraceSummary<T>,
    path: impl AsRef<Path>,
) -> Result<(), TraceIoError> {
    let text = serde_json::to_string_pretty(summary)?;
    std::fs::write(path.as_ref(), text).map_err(|source| TraceIoError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })
}

/// Reads an events/summary sidecar.
pub fn read_trace_summary<T: Real + for<'de> Deserialize<'de>>(
    path: impl AsRef<Path>,
) -> Result<TraceSummary<T>, TraceIoError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|source| TraceIoError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    let summary: TraceSummary<T> = serde_json::from_str(&text)?;
    if summary.schema_version != TRACE_SCHEMA_VERSION {
        return Err(TraceIoError::UnsupportedVersion {
            found: summary.schema_version,
        });
    }
    Ok(summary)
}

/// Rebuilds a full trace from CSV rows and a sidecar summary.
pub fn trace_from_parts<T: Real>(
    rows: &[TraceRow<T>],
    summary: &TraceSummary<T>,
) -> Result<ImpactTrace<T>, super::ContactError> {
    let model = ContactModel::with_family(summary.family, summary.k, summary.c, summary.m_star)?;
    Ok(ImpactTrace {
        time: rows.iter().map(|r| r.time).collect(),
        x: rows.iter().map(|r| r.x).collect(),
        xdot: rows.iter().map(|r| r.xdot).collect(),
        f_n: rows.iter().map(|r| r.f_n).collect(),
        p_n: rows.iter().map(|r| r.p_n).collect(),
        e_k: rows.iter().map(|r| r.e_k).collect(),
        e_p: rows.iter().map(|r| r.e_p).collect(),
        e_d: rows.iter().map(|r| r.e_d).collect(),
        events: summary.events,
        model,
        v_pre: summary.v_pre,
    })
}

fn csv_io(path: &Path) -> impl FnOnce(csv::Error) -> TraceIoError + '_ {
    move |e| {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(source) => TraceIoError::Io {
                    path: path.display().to_string(),
                    source,
                },
                _ => unreachable!("is_io_error guarantees an Io kind"),
            }
        } else {
            TraceIoError::Csv(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::simulate;

    #[test]
    fn trace_round_trips_losslessly() {
        let model = ContactModel::viscoelastic(5e4, 1.2e6, 3.1).unwrap();
        let trace = simulate(&model, -0.13).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("trace.csv");
        let json_path = dir.path().join("events.json");

        write_trace_csv(&trace, &csv_path).unwrap();
        let summary = TraceSummary::from_trace(&trace);
        write_trace_summary(&summary, &json_path).unwrap();

        let rows: Vec<TraceRow<f64>> = read_trace_csv(&csv_path).unwrap();
        let summary_back: TraceSummary<f64> = read_trace_summary(&json_path).unwrap();
        let rebuilt = trace_from_parts(&rows, &summary_back).unwrap();
        assert_eq!(rebuilt, trace);

        // header is bit-exact
        let text = std::fs::read_to_string(&csv_path).unwrap();
        assert!(text.starts_with("time,x,xdot,f_n,p_n,E_k,E_p,E_d\n"));
    }
}
