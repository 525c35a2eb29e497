//! `impact identify`: per-profile grey-box fits, per-condition means, and a
//! restitution-vs-velocity table ready for plotting.

use std::collections::BTreeMap;
use std::path::PathBuf;

use impact_dynamics::identify::{
    estimate_cor_from_profile, fit_maxwell, fit_viscoelastic, profile_io, trim_first_impact,
    FitResult, ForceProfile,
};
use impact_dynamics::nalgebra::DVector;
use impact_dynamics::report;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{parse_float_list, IdentifyArgs, ModelArg};
use crate::commands::{out_file, with_parallelism};
use crate::errors::{classify_report, CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitRow {
    pub profile: String,
    pub label: String,
    pub velocity: f64,
    pub k: f64,
    pub c: f64,
    pub rms: f64,
    pub cor: f64,
    /// Model-free restitution from the integrated impulse.
    pub cor_impulse: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionRow {
    pub label: String,
    pub velocity: f64,
    pub n: usize,
    pub mean_cor: f64,
    pub std_cor: f64,
    pub mean_k: f64,
    pub mean_c: f64,
}

struct Job {
    path: PathBuf,
    profile: ForceProfile<f64>,
    v_pre: f64,
}

pub fn run(args: &IdentifyArgs) -> CliResult {
    let m_star = resolve_m_star(args)?;
    let fallback: Option<Vec<f64>> = match &args.velocity {
        Some(text) => Some(parse_float_list(text, "velocity").map_err(CliError::Input)?),
        None => None,
    };
    if let Some(list) = &fallback {
        if list.len() != 1 && list.len() != args.profiles.len() {
            return Err(CliError::input(anyhow::anyhow!(
                "--velocity must give one speed or one per profile ({} given, {} profiles)",
                list.len(),
                args.profiles.len()
            )));
        }
    }

    // load + trim up front so input problems surface before any fitting
    let mut jobs = Vec::new();
    let mut failures: Vec<(String, String)> = Vec::new();
    for (i, path) in args.profiles.iter().enumerate() {
        match load_job(args, i, path, &fallback) {
            Ok(job) => jobs.push(job),
            Err(msg) => failures.push((path.display().to_string(), msg)),
        }
    }
    if jobs.is_empty() {
        return Err(CliError::input(anyhow::anyhow!(
            "no usable profiles: {}",
            failures
                .iter()
                .map(|(p, m)| format!("{p}: {m}"))
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }

    let model = args.model;
    let results: Vec<Result<FitRow, (String, String)>> = with_parallelism(args.parallel, || {
        jobs.par_iter()
            .map(|job| {
                let fit: Result<FitResult<f64>, _> = match model {
                    ModelArg::Viscoelastic => fit_viscoelastic(&job.profile, m_star, job.v_pre),
                    ModelArg::Maxwell => fit_maxwell(&job.profile, m_star, job.v_pre),
                    ModelArg::Spring => {
                        return Err((
                            job.path.display().to_string(),
                            "the spring family has no dashpot to identify; \
                             fit viscoelastic or maxwell"
                                .into(),
                        ))
                    }
                };
                let fit = fit.map_err(|e| (job.path.display().to_string(), e.to_string()))?;
                let cor_impulse = estimate_cor_from_profile(&job.profile, m_star, job.v_pre)
                    .map_err(|e| (job.path.display().to_string(), e.to_string()))?;
                Ok(FitRow {
                    profile: job.path.display().to_string(),
                    label: job.profile.label.clone().unwrap_or_default(),
                    velocity: -job.v_pre,
                    k: fit.k,
                    c: fit.c,
                    rms: fit.rms,
                    cor: fit.cor,
                    cor_impulse,
                    iterations: fit.iterations,
                })
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    for (path, msg) in &failures {
        eprintln!("warning: {path}: {msg}");
    }
    if rows.is_empty() {
        return Err(CliError::numerical(anyhow::anyhow!(
            "every profile failed to fit"
        )));
    }

    // per-condition means, keyed by (label, velocity)
    let mut groups: BTreeMap<(String, String), Vec<&FitRow>> = BTreeMap::new();
    for row in &rows {
        let key = (row.label.clone(), format!("{:.6}", row.velocity));
        groups.entry(key).or_default().push(row);
    }
    let mut conditions = Vec::new();
    for ((label, _), members) in groups {
        let n = members.len();
        let mean = |f: &dyn Fn(&FitRow) -> f64| {
            members.iter().map(|r| f(r)).sum::<f64>() / n as f64
        };
        let mean_cor = mean(&|r| r.cor);
        let var = members
            .iter()
            .map(|r| (r.cor - mean_cor).powi(2))
            .sum::<f64>()
            / n as f64;
        conditions.push(ConditionRow {
            label,
            velocity: members[0].velocity,
            n,
            mean_cor,
            std_cor: var.sqrt(),
            mean_k: mean(&|r| r.k),
            mean_c: mean(&|r| r.c),
        });
    }
    conditions.sort_by(|a, b| {
        (a.label.clone(), a.velocity)
            .partial_cmp(&(b.label.clone(), b.velocity))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let fits_path = out_file(&args.out, "fits.csv")?;
    report::write_csv_rows(&rows, &fits_path).map_err(classify_report)?;
    let cor_path = out_file(&args.out, "cor_vs_velocity.csv")?;
    report::write_csv_rows(&conditions, &cor_path).map_err(classify_report)?;

    println!(
        "{:>9} {:>3} {:>10} {:>10} {:>12} {:>12}",
        "v (m/s)", "n", "mean cor", "std cor", "mean k", "mean c"
    );
    for c in &conditions {
        println!(
            "{:>9.4} {:>3} {:>10.5} {:>10.5} {:>12.5e} {:>12.5e}",
            c.velocity, c.n, c.mean_cor, c.std_cor, c.mean_k, c.mean_c
        );
    }
    println!(
        "fitted {} of {} profiles; wrote {} and {}",
        rows.len(),
        args.profiles.len(),
        fits_path.display(),
        cor_path.display()
    );
    Ok(())
}

fn resolve_m_star(args: &IdentifyArgs) -> Result<f64, CliError> {
    match (args.m_star, &args.chain) {
        (Some(v), _) if v > 0.0 => Ok(v),
        (Some(v), _) => Err(CliError::input(anyhow::anyhow!(
            "--m-star must be positive, got {v}"
        ))),
        (None, Some(chain_path)) => {
            let model = impact_dynamics::chain::file::load_chain::<f64>(chain_path)
                .map_err(CliError::input)?;
            let q_text = args.q.as_ref().ok_or_else(|| {
                CliError::input(anyhow::anyhow!("--chain needs --q to derive the effective mass"))
            })?;
            let q = DVector::from_vec(
                parse_float_list(q_text, "q").map_err(CliError::Input)?,
            );
            report::effective_mass_for(&model, &q, args.iim_method.into())
                .map_err(classify_report)
        }
        (None, None) => Err(CliError::input(anyhow::anyhow!(
            "provide --m-star or --chain/--q"
        ))),
    }
}

fn load_job(
    args: &IdentifyArgs,
    index: usize,
    path: &PathBuf,
    fallback: &Option<Vec<f64>>,
) -> Result<Job, String> {
    let profile: ForceProfile<f64> =
        profile_io::read_profile(path).map_err(|e| e.to_string())?;
    let v_pre = profile
        .v_pre
        .or_else(|| {
            fallback.as_ref().map(|list| {
                let speed = if list.len() == 1 { list[0] } else { list[index] };
                -speed.abs()
            })
        })
        .ok_or("no approach velocity: add a JSON sidecar or pass --velocity")?;
    let trimmed = trim_first_impact(&profile, args.threshold).map_err(|e| e.to_string())?;
    Ok(Job {
        path: path.clone(),
        profile: trimmed,
        v_pre,
    })
}
