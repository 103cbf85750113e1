use std::fmt;

use jrp_core::cost::CostError;
use jrp_core::eoq::EoqError;
use jrp_core::model::LoadError;
use jrp_core::reduce::ReduceError;
use jrp_core::sat::{DimacsError, Sat3Error, SatError};
use jrp_core::solve::SolveError;
use jrp_core::sync::SyncError;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Violation = 1,
    Input = 2,
    Cap = 3,
    Config = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn new(exit: Exit, message: impl Into<String>) -> Self {
        CliError {
            exit,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError::new(Exit::Input, message)
    }

    /// Prefixes the message with where it came from.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn sync_exit(e: &SyncError) -> Exit {
    match e {
        SyncError::SubsetCap { .. } | SyncError::EnumerationCap { .. } => Exit::Cap,
        _ => Exit::Input,
    }
}

impl From<SyncError> for CliError {
    fn from(e: SyncError) -> Self {
        CliError::new(sync_exit(&e), e.to_string())
    }
}

impl From<CostError> for CliError {
    fn from(e: CostError) -> Self {
        let exit = match &e {
            CostError::Sync(s) => sync_exit(s),
            _ => Exit::Input,
        };
        CliError::new(exit, e.to_string())
    }
}

impl From<SatError> for CliError {
    fn from(e: SatError) -> Self {
        let exit = match e {
            SatError::TooManyVariables { .. } => Exit::Cap,
            SatError::OutOfRange { .. } => Exit::Input,
        };
        CliError::new(exit, e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Cost(c) => c.into(),
            SolveError::ProfileCap { .. } => CliError::new(Exit::Cap, e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<ReduceError> for CliError {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::Configuration { .. } => CliError::new(Exit::Config, e.to_string()),
            ReduceError::Cap { .. } => CliError::new(Exit::Cap, e.to_string()),
            ReduceError::Cost(c) => c.into(),
            ReduceError::Sat(s) => s.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<DimacsError> for CliError {
    fn from(e: DimacsError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<Sat3Error> for CliError {
    fn from(e: Sat3Error) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<EoqError> for CliError {
    fn from(e: EoqError) -> Self {
        CliError::input(e.to_string())
    }
}
