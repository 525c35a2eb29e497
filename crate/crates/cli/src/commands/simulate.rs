//! `impact simulate`: one impact, exported as the trace CSV plus an events
//! JSON sidecar.

use impact_dynamics::contact::{
    io as trace_io, simulate_with, ContactModel, ModelFamily, SimSettings,
};
use impact_dynamics::report::{self, MStarSpec};

use crate::args::{ModelArg, SimulateArgs};
use crate::commands::{out_file, resolve_chain};
use crate::errors::{classify_report, CliError, CliResult};

impl From<ModelArg> for ModelFamily {
    fn from(value: ModelArg) -> Self {
        match value {
            ModelArg::Spring => ModelFamily::Spring,
            ModelArg::Maxwell => ModelFamily::Maxwell,
            ModelArg::Viscoelastic => ModelFamily::Viscoelastic,
        }
    }
}

/// Builds the contact model from flags, falling back to the scenario's
/// `[model]` section, deriving `m_star` from the chain when not explicit.
pub fn contact_model_from(
    args_model: Option<ModelArg>,
    args_k: Option<f64>,
    args_c: Option<f64>,
    args_m_star: Option<f64>,
    iim_method: crate::args::IimMethodArg,
    model: &impact_dynamics::chain::ChainModel<f64>,
    q: &impact_dynamics::nalgebra::DVector<f64>,
    scenario: Option<&report::Scenario<f64>>,
) -> Result<ContactModel<f64>, CliError> {
    let selection = scenario.and_then(|s| s.contact.as_ref());
    let family: ModelFamily = match (args_model, selection) {
        (Some(m), _) => m.into(),
        (None, Some(sel)) => sel.family,
        (None, None) => {
            return Err(CliError::input(anyhow::anyhow!(
                "provide --model/--k/--c or a scenario with a [model] section"
            )))
        }
    };
    let k = args_k
        .or(selection.map(|s| s.k))
        .ok_or_else(|| CliError::input(anyhow::anyhow!("missing --k")))?;
    let c = args_c.or(selection.map(|s| s.c)).unwrap_or(0.0);
    if family != ModelFamily::Spring && c <= 0.0 {
        return Err(CliError::input(anyhow::anyhow!(
            "--c must be positive for the {family} family"
        )));
    }
    let m_star = match (args_m_star, selection.map(|s| &s.m_star)) {
        (Some(v), _) => v,
        (None, Some(MStarSpec::Value(v))) => *v,
        (None, Some(MStarSpec::Method(method))) => {
            report::effective_mass_for(model, q, *method).map_err(classify_report)?
        }
        (None, None) => report::effective_mass_for(model, q, iim_method.into())
            .map_err(classify_report)?,
    };
    ContactModel::with_family(family, k, c, m_star).map_err(CliError::input)
}

pub fn run(args: &SimulateArgs) -> CliResult {
    let (model, q, scenario) = resolve_chain(&args.chain)?;
    let contact = contact_model_from(
        args.model,
        args.k,
        args.c,
        args.m_star,
        args.iim_method,
        &model,
        &q,
        scenario.as_ref(),
    )?;
    let speed = match (args.velocity, &scenario) {
        (Some(v), _) => v,
        (None, Some(s)) => s.speed,
        (None, None) => {
            return Err(CliError::input(anyhow::anyhow!(
                "provide --velocity or a scenario with a speed"
            )))
        }
    };
    if !(speed > 0.0) {
        return Err(CliError::input(anyhow::anyhow!(
            "approach speed must be positive, got {speed}"
        )));
    }

    let trace =
        simulate_with(&contact, -speed, &SimSettings::default_settings()).map_err(CliError::numerical)?;

    let csv_path = out_file(&args.out, "trace.csv")?;
    trace_io::write_trace_csv(&trace, &csv_path).map_err(CliError::input)?;
    let summary = trace_io::TraceSummary::from_trace(&trace);
    let json_path = out_file(&args.out, "events.json")?;
    trace_io::write_trace_summary(&summary, &json_path).map_err(CliError::input)?;

    let ev = &trace.events;
    println!(
        "{} impact: m* = {:.4} kg, k = {:.4e}, c = {:.4e}, v = -{speed} m/s",
        contact.family, contact.m_star, contact.k, contact.c
    );
    println!(
        "compression end {:.6} s, restitution end {:.6} s",
        ev.t_compression_end, ev.t_restitution_end
    );
    println!(
        "peak force {:.3} N at {:.6} s; impulse p_nc {:.5} N s, total {:.5} N s",
        ev.peak_force, ev.t_peak_force, ev.p_nc, ev.p_total
    );
    println!(
        "exit velocity {:.6} m/s (restitution {:.4}); residual compression {:.3e} m",
        ev.v_exit, ev.cor, ev.x_end
    );
    println!(
        "energy: loss {:.6} J of {:.6} J initial; max balance residual {:.3e} J",
        summary.energy_loss, summary.initial_energy, summary.max_energy_residual
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}
