//! Exit-code classification: input/parse problems exit 2, numerical
//! failures exit 3.

use impact_dynamics::report::ReportError;

#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Numerical(anyhow::Error),
}

impl CliError {
    pub fn input(err: impl Into<anyhow::Error>) -> Self {
        CliError::Input(err.into())
    }

    pub fn numerical(err: impl Into<anyhow::Error>) -> Self {
        CliError::Numerical(err.into())
    }
}

/// Splits library report errors into the two exit classes: everything that
/// stems from files, schemas, or argument validation is an input error; the
/// rest (singular matrices, missed events, diverged fits) is numerical.
pub fn classify_report(err: ReportError) -> CliError {
    match &err {
        ReportError::Io { .. }
        | ReportError::Parse(_)
        | ReportError::UnsupportedVersion { .. }
        | ReportError::Invalid { .. }
        | ReportError::ChainFile(_)
        | ReportError::Csv(_)
        | ReportError::Json(_) => CliError::input(err),
        ReportError::Chain(_)
        | ReportError::Iim(_)
        | ReportError::Contact(_)
        | ReportError::TraceIo(_) => CliError::numerical(err),
    }
}

pub type CliResult = Result<(), CliError>;
