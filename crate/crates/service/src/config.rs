use std::fmt;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use sigmadb::SolveBudget;

use crate::error::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    /// A JSON array with one object per tuple.
    Json,
}

impl FromStr for OutputFormat {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" | "json-records" => Ok(OutputFormat::Json),
            other => Err(ServiceError::Config(format!(
                "unknown output format {other}; expected table, csv or json"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Table => "table",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Script file the catalog is loaded from and saved back to.
    pub catalog_path: Option<PathBuf>,
    pub budget: SolveBudget,
    pub listen: SocketAddr,
    pub format: OutputFormat,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            catalog_path: None,
            budget: SolveBudget::default(),
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            format: OutputFormat::Table,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ServiceError> {
        let b = &self.budget;
        if b.max_solutions == 0 || b.max_nodes == 0 || b.timeout == Duration::ZERO {
            return Err(ServiceError::Config("budgets must be positive".into()));
        }
        Ok(())
    }
}
