//! `impact sweep`: one summary row per approach speed, combining the impulse
//! predictions of every candidate with a simulated impact.

use impact_dynamics::contact::SimSettings;
use impact_dynamics::report::{self, SweepRow};
use rayon::prelude::*;

use crate::args::SweepArgs;
use crate::commands::{out_file, resolve_chain, with_parallelism};
use crate::errors::{classify_report, CliError, CliResult};

pub fn run(args: &SweepArgs) -> CliResult {
    let (model, q, scenario) = resolve_chain(&args.chain)?;
    let contact = super::simulate::contact_model_from(
        args.model_flags.model,
        args.model_flags.k,
        args.model_flags.c,
        args.model_flags.m_star,
        args.model_flags.iim_method,
        &model,
        &q,
        scenario.as_ref(),
    )?;
    let speeds: Vec<f64> = match (&args.velocity, &scenario) {
        (Some(text), _) => {
            crate::args::parse_float_list(text, "velocity").map_err(CliError::Input)?
        }
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
    if speeds.iter().any(|s| *s <= 0.0) {
        return Err(CliError::input(anyhow::anyhow!(
            "approach speeds must be positive"
        )));
    }

    let settings = SimSettings::default_settings();
    // one row per speed, preserving the input order
    let rows: Result<Vec<SweepRow<f64>>, CliError> = with_parallelism(args.parallel, || {
        speeds
            .par_iter()
            .map(|&speed| {
                report::sweep(&model, &q, &contact, &[speed], &settings)
                    .map(|mut rows| rows.remove(0))
                    .map_err(classify_report)
            })
            .collect()
    })?;
    let rows = rows?;

    let path = out_file(&args.out, "sweep.csv")?;
    report::write_csv_rows(&rows, &path).map_err(classify_report)?;

    println!(
        "{:>9} {:>10} {:>10} {:>12} {:>11} {:>8} {:>10} {:>10}",
        "v (m/s)", "p_nc gm", "p_nc crb", "p_nc crbflx", "algebraic", "cor", "dur (ms)", "loss (J)"
    );
    for row in &rows {
        println!(
            "{:>9.4} {:>10.5} {:>10.5} {:>12.5} {:>11} {:>8.4} {:>10.4} {:>10.6}",
            row.velocity,
            row.p_nc_gm,
            row.p_nc_crb,
            row.p_nc_crb_flex,
            row.p_algebraic
                .map(|p| format!("{p:.5}"))
                .unwrap_or_else(|| "-".into()),
            row.cor,
            row.duration * 1e3,
            row.energy_loss
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}
