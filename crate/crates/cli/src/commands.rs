//! Subcommand implementations.

pub mod identify;
pub mod iim;
pub mod impulse;
pub mod simulate;
pub mod sweep;

use std::path::{Path, PathBuf};

use impact_dynamics::chain::file::load_chain;
use impact_dynamics::chain::ChainModel;
use impact_dynamics::report::Scenario;
use impact_dynamics::nalgebra::DVector;

use crate::args::{parse_float_list, ChainSelect};
use crate::errors::{classify_report, CliError};

/// Resolves chain + configuration from `--scenario` and/or `--chain`/`--q`
/// (explicit flags override the scenario).
pub fn resolve_chain(
    select: &ChainSelect,
) -> Result<(ChainModel<f64>, DVector<f64>, Option<Scenario<f64>>), CliError> {
    let scenario = match &select.scenario {
        Some(path) => Some(Scenario::<f64>::load(path).map_err(classify_report)?),
        None => None,
    };
    let model = match (&select.chain, &scenario) {
        (Some(path), _) => load_chain::<f64>(path).map_err(CliError::input)?,
        (None, Some(s)) => s.model.clone(),
        (None, None) => {
            return Err(CliError::input(anyhow::anyhow!(
                "provide --chain or --scenario"
            )))
        }
    };
    let q = match (&select.q, &scenario) {
        (Some(text), _) => {
            let values = parse_float_list(text, "q").map_err(CliError::Input)?;
            DVector::from_vec(values)
        }
        (None, Some(s)) => s.q.clone(),
        (None, None) => {
            return Err(CliError::input(anyhow::anyhow!("provide --q or --scenario")))
        }
    };
    if q.len() != model.dof() {
        return Err(CliError::input(anyhow::anyhow!(
            "q has {} entries but the chain has {} joints",
            q.len(),
            model.dof()
        )));
    }
    Ok((model, q, scenario))
}

/// Creates the output directory and returns a path inside it.
pub fn out_file(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::input(anyhow::anyhow!("cannot create `{}`: {e}", dir.display()))
    })?;
    Ok(dir.join(name))
}

/// Installs a rayon pool of the requested width for the closure.
pub fn with_parallelism<R: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::input(anyhow::anyhow!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
