//! Running statement sequences against a catalog.

use std::path::Path;

use sigmadb::exec::{apply, StatementOutcome};
use sigmadb::lang::parse_script;
use sigmadb::{Catalog, SolveBudget};

use crate::error::ServiceError;

/// One statement that ran.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Executed {
    /// Position in the script, counting from 1.
    pub index: usize,
    pub line: usize,
    pub outcome: StatementOutcome,
}

#[derive(Debug, Clone)]
pub struct ScriptOutput {
    pub catalog: Catalog,
    pub executed: Vec<Executed>,
}

impl ScriptOutput {
    /// Whether any statement changed the catalog.
    pub fn changed(&self) -> bool {
        self.executed
            .iter()
            .any(|e| !matches!(e.outcome, StatementOutcome::Rows(_)))
    }
}

/// Runs every statement in order against an evolving catalog. The first
/// failure aborts the run and none of its changes are kept.
pub fn run_script(catalog: &Catalog, text: &str, budget: &SolveBudget) -> Result<ScriptOutput, ServiceError> {
    let mut current = catalog.clone();
    let mut executed = Vec::new();
    for (i, located) in parse_script(text)?.into_iter().enumerate() {
        let (next, outcome) =
            apply(&current, &located.statement, budget).map_err(|source| ServiceError::Statement {
                index: i + 1,
                line: located.line,
                source,
            })?;
        if let Some(next) = next {
            current = next;
        }
        executed.push(Executed {
            index: i + 1,
            line: located.line,
            outcome,
        });
    }
    Ok(ScriptOutput {
        catalog: current,
        executed,
    })
}

pub fn run_file(catalog: &Catalog, path: &Path, budget: &SolveBudget) -> Result<ScriptOutput, ServiceError> {
    let text = std::fs::read_to_string(path).map_err(|e| ServiceError::io(path, e))?;
    run_script(catalog, &text, budget)
}

/// The optimized plan of a query, one node per line.
pub fn explain(catalog: &Catalog, sql: &str) -> sigmadb::Result<String> {
    match sigmadb::lang::parse_statement(sql)? {
        sigmadb::lang::ast::Statement::Select(q) => {
            let plan = sigmadb::plan::optimize(&sigmadb::plan::lower_query(&q, catalog)?)?;
            Ok(plan.to_string())
        }
        _ => Err(sigmadb::Error::NotAQuery(sql.trim().chars().take(40).collect())),
    }
}
