//! Catalogs saved as replayable scripts of the surface language.

use std::path::Path;

use num_rational::BigRational;
use sigmadb::lang::ast::{Literal, SelectQuery, Source, Statement};
use sigmadb::lang::render_statement;
use sigmadb::model::{CatalogEntry, RelationDef};
use sigmadb::{Catalog, Scalar, SolveBudget};

use crate::error::ServiceError;
use crate::script::run_script;

/// Statements that rebuild `catalog` from nothing, in definition order.
/// Stored tuples follow their CREATE TABLE as one INSERT.
pub fn catalog_statements(catalog: &Catalog) -> Vec<Statement> {
    let mut out = Vec::new();
    for (name, entry) in catalog.entries() {
        match entry {
            CatalogEntry::Type(ty) => out.push(Statement::CreateEnum {
                name: name.to_string(),
                values: ty.values().to_vec(),
            }),
            CatalogEntry::Relation(RelationDef::Data { heading, body }) => {
                out.push(Statement::CreateTable {
                    name: name.to_string(),
                    columns: catalog.column_defs(heading),
                });
                if !body.is_empty() {
                    out.push(Statement::Insert {
                        table: name.to_string(),
                        rows: body.iter().map(|t| t.values().iter().map(literal).collect()).collect(),
                    });
                }
            }
            CatalogEntry::Relation(RelationDef::Sigma { heading, predicate }) => out.push(Statement::CreateView {
                name: name.to_string(),
                query: SelectQuery {
                    filter: predicate.clone(),
                    ..SelectQuery::star(Source::Complete(catalog.column_defs(heading)))
                },
            }),
            CatalogEntry::Relation(RelationDef::View { query }) => out.push(Statement::CreateView {
                name: name.to_string(),
                query: query.clone(),
            }),
        }
    }
    out
}

fn literal(v: &Scalar) -> Literal {
    match v {
        Scalar::Bool(b) => Literal::Bool(*b),
        Scalar::Int(i) => Literal::Number(BigRational::from_integer(i.clone())),
        Scalar::Rat(r) => Literal::Number(r.clone()),
        Scalar::Enum(e) => Literal::Str(e.name().to_string()),
    }
}

/// The saved form of a catalog: one statement per line.
pub fn render_catalog(catalog: &Catalog) -> String {
    catalog_statements(catalog)
        .iter()
        .map(|s| render_statement(s) + "\n")
        .collect()
}

pub fn save_catalog(catalog: &Catalog, path: &Path) -> Result<(), ServiceError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, render_catalog(catalog)).map_err(|e| ServiceError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| ServiceError::io(path, e))
}

pub fn load_catalog(path: &Path) -> Result<Catalog, ServiceError> {
    let text = std::fs::read_to_string(path).map_err(|e| ServiceError::io(path, e))?;
    load_text(&text)
}

/// Replays a saved catalog script on an empty catalog.
pub fn load_text(text: &str) -> Result<Catalog, ServiceError> {
    Ok(run_script(&Catalog::new(), text, &SolveBudget::default())?.catalog)
}
