//! Batch driver for `pqlap-core`: parameter files, sweeps and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod output;
pub mod params;
pub mod plot;
pub mod run;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use output::{render, write_atomic};
pub use params::{ParamSet, Point, Value};
pub use plot::{render_plot_data, SELECTORS};
pub use run::{run, Item, Report, Results};

pub const SCHEMA: u32 = 1;

/// Recognised `--tol` names.
pub const TOLERANCES: &[&str] = &["solver_tol", "tol_factor", "grid_points", "max_newton", "max_damps"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// True for core errors caused by the numerics rather than by the input.
pub fn is_numerical(e: &pqlap_core::Error) -> bool {
    use pqlap_core::Error::*;
    matches!(
        e,
        NewtonStalled(_) | SingularJacobian(_) | FieldNotSmooth(_) | DegenerateGradient { .. }
    )
}

impl From<pqlap_core::Error> for CliError {
    fn from(e: pqlap_core::Error) -> Self {
        if is_numerical(&e) {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    SearchB,
    IlWindow,
    VerifyIdentities,
    SolveRadial,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::SearchB => "search-b",
            Command::IlWindow => "il-window",
            Command::VerifyIdentities => "verify-identities",
            Command::SolveRadial => "solve-radial",
            Command::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Command::Classify,
            Command::SearchB,
            Command::IlWindow,
            Command::VerifyIdentities,
            Command::SolveRadial,
            Command::Sweep,
        ]
        .into_iter()
        .find(|c| c.as_str() == s || c.as_str().replace('-', "_") == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Fully resolved run configuration; echoed verbatim into every report.
/// The output path is not part of it, so a report's bytes do not depend on
/// where it is written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: ParamSet,
    pub format: Format,
    pub seed: u64,
    pub jobs: usize,
    pub optimal_search: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub timing: bool,
}

impl RunConfig {
    pub fn new(command: Command, params: ParamSet) -> Self {
        Self {
            command,
            params,
            format: Format::Json,
            seed: 0,
            jobs: 0,
            optimal_search: false,
            tolerances: BTreeMap::new(),
            timing: false,
        }
    }

    /// Parses `name=value` and stores it after checking the name.
    pub fn set_tolerance(&mut self, assignment: &str) -> Result<(), CliError> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tol expects name=value, got `{assignment}`")))?;
        let name = name.trim();
        if !TOLERANCES.contains(&name) {
            return Err(CliError::Usage(format!(
                "unknown tolerance `{name}` (known: {})",
                TOLERANCES.join(", ")
            )));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("tolerance `{name}`: `{}` is not a number", value.trim())))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::Usage(format!("tolerance `{name}` must be positive")));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> Option<f64> {
        self.tolerances.get(name).copied()
    }

    pub fn count_tolerance(&self, name: &str) -> Result<Option<usize>, CliError> {
        match self.tolerance(name) {
            None => Ok(None),
            Some(x) if x.fract() == 0.0 && x >= 1.0 => Ok(Some(x as usize)),
            Some(x) => Err(CliError::Usage(format!(
                "tolerance `{name}` must be a positive integer, got {x}"
            ))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let params = ParamSet::parse("kind = product\nN = [2, 3]\np = 2.2\nq = 2\ns = 0.5\nm = 2\n").unwrap();
        let mut cfg = RunConfig::new(Command::Sweep, params);
        cfg.seed = 17;
        cfg.set_tolerance("solver_tol=1e-9").unwrap();
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn unknown_tolerance_is_usage_error() {
        let mut cfg = RunConfig::new(Command::Classify, ParamSet::default());
        let err = cfg.set_tolerance("bogus=1").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(cfg.set_tolerance("grid_points=-3").is_err());
    }

    #[test]
    fn command_names() {
        assert_eq!(Command::parse("search-b"), Some(Command::SearchB));
        assert_eq!(Command::parse("solve_radial"), Some(Command::SolveRadial));
        assert_eq!(Command::parse("plot"), None);
    }
}
