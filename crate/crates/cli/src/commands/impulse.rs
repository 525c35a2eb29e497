//! `impact impulse`: per-method impulse predictions, optionally joined with
//! measured impulses, written as CSV.

use std::path::Path;

use impact_dynamics::report;
use serde::Deserialize;

use crate::args::{parse_float_list, ImpulseArgs};
use crate::commands::{out_file, resolve_chain};
use crate::errors::{classify_report, CliError, CliResult};

#[derive(Deserialize)]
struct MeasuredRow {
    velocity_mps: f64,
    impulse_ns: f64,
}

fn load_measured(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(CliError::input)?;
    let mut out = Vec::new();
    for row in reader.deserialize::<MeasuredRow>() {
        let row = row.map_err(CliError::input)?;
        out.push((row.velocity_mps, row.impulse_ns));
    }
    Ok(out)
}

pub fn run(args: &ImpulseArgs) -> CliResult {
    let (model, q, scenario) = resolve_chain(&args.chain)?;
    let speeds: Vec<f64> = match (&args.velocity, &scenario) {
        (Some(text), _) => parse_float_list(text, "velocity").map_err(CliError::Input)?,
        (None, Some(s)) => vec![s.speed],
        (None, None) => {
            return Err(CliError::input(anyhow::anyhow!(
                "provide --velocity or a scenario with a speed"
            )))
        }
    };
    if speeds.is_empty() {
        return Err(CliError::input(anyhow::anyhow!("empty velocity list")));
    }
    if !(0.0..=1.0).contains(&args.e_r) {
        return Err(CliError::input(anyhow::anyhow!(
            "--e-r must lie in [0, 1], got {}",
            args.e_r
        )));
    }
    let measured = match &args.measured {
        Some(path) => Some(load_measured(path)?),
        None => None,
    };

    let rows = report::impulse_rows(&model, &q, &speeds, args.e_r, measured.as_deref())
        .map_err(classify_report)?;

    let path = out_file(&args.out, "impulse.csv")?;
    report::write_csv_rows(&rows, &path).map_err(classify_report)?;

    println!(
        "{:>9} {:>10} {:>10} {:>12} {:>11} {:>10}",
        "v (m/s)", "p_nc gm", "p_nc crb", "p_nc crbflx", "algebraic", "measured"
    );
    for row in &rows {
        println!(
            "{:>9.4} {:>10.5} {:>10.5} {:>12.5} {:>11} {:>10}",
            row.velocity,
            row.p_nc_gm,
            row.p_nc_crb,
            row.p_nc_crb_flex,
            row.p_algebraic
                .map(|p| format!("{p:.5}"))
                .unwrap_or_else(|| "-".into()),
            row.measured
                .map(|m| format!("{m:.5}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}
