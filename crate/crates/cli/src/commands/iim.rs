//! `impact iim`: the four candidate matrices, effective masses, and the
//! additive-identity residual, written as JSON.

use impact_dynamics::report;

use crate::args::IimArgs;
use crate::commands::{out_file, resolve_chain};
use crate::errors::{classify_report, CliResult};

pub fn run(args: &IimArgs) -> CliResult {
    let (model, q, _) = resolve_chain(&args.chain)?;
    let summary = report::iim_summary(&model, &q).map_err(classify_report)?;

    let path = out_file(&args.out, "iim.json")?;
    report::write_json(&summary, &path).map_err(classify_report)?;

    println!("chain: {} ({} joints)", summary.chain, q.len());
    println!(
        "normal: [{:+.4}, {:+.4}, {:+.4}]",
        summary.normal[0], summary.normal[1], summary.normal[2]
    );
    println!("{:<10} {:>14}", "method", "eff. mass (kg)");
    for entry in &summary.methods {
        println!("{:<10} {:>14.6}", entry.method.tag(), entry.effective_mass);
    }
    match summary.em_normal_mass {
        Some(mass) => println!("{:<10} {:>14.6}", "em", mass),
        None => println!("{:<10} {:>14}", "em", "n/a (dof < 6)"),
    }
    println!(
        "identity residual |W_gm - (W_crb + W_flex)| / |W_gm| = {:.3e}",
        summary.identity_residual
    );
    println!("wrote {}", path.display());
    Ok(())
}
