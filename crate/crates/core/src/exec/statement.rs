//! Applying statements to a catalog.

use crate::error::{Error, Result};
use crate::expr::Scope;
use crate::lang::ast::{Literal, Projection, SelectQuery, Source, Statement};
use crate::lang::parse_statement;
use crate::model::{Catalog, DomainSpec, EnumType, EnumValue, ModelError, RelationDef, RelationKind, Scalar, Tuple};
use crate::plan::{lower_query, optimize};
use crate::solver::SolveBudget;

use super::{execute, RelationResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementOutcome {
    TypeDefined {
        name: String,
    },
    RelationDefined {
        name: String,
        kind: RelationKind,
    },
    /// `added` counts tuples that were not already present.
    Inserted {
        name: String,
        added: usize,
    },
    Rows(RelationResult),
}

/// Applies one statement. Returns the new catalog (`None` when the
/// statement only reads) and what happened. `catalog` is not modified.
pub fn apply(catalog: &Catalog, stmt: &Statement, budget: &SolveBudget) -> Result<(Option<Catalog>, StatementOutcome)> {
    match stmt {
        Statement::CreateEnum { name, values } => {
            let next = catalog.define_type(EnumType::new(name.clone(), values.clone())?)?;
            Ok((Some(next), StatementOutcome::TypeDefined { name: name.clone() }))
        }
        Statement::CreateTable { name, columns } => {
            let heading = catalog.resolve_columns(columns)?;
            let next = catalog.define(name, RelationDef::data(heading))?;
            Ok((
                Some(next),
                StatementOutcome::RelationDefined {
                    name: name.clone(),
                    kind: RelationKind::Data,
                },
            ))
        }
        Statement::CreateView { name, query } => {
            let def = view_definition(catalog, query)?;
            let kind = def.kind();
            let next = catalog.define(name, def)?;
            Ok((
                Some(next),
                StatementOutcome::RelationDefined {
                    name: name.clone(),
                    kind,
                },
            ))
        }
        Statement::Insert { table, rows } => {
            let heading = match catalog.relation(table) {
                Some(RelationDef::Data { heading, .. }) => heading,
                Some(_) => return Err(ModelError::TargetNotDataRelation(table.clone()).into()),
                None => return Err(ModelError::UnknownReference(table.clone()).into()),
            };
            let mut tuples = Vec::with_capacity(rows.len());
            for row in rows {
                if row.len() != heading.arity() {
                    return Err(ModelError::ArityMismatch {
                        expected: heading.arity(),
                        found: row.len(),
                    }
                    .into());
                }
                let values = row
                    .iter()
                    .zip(heading.attrs())
                    .map(|(lit, a)| literal_scalar(lit, &a.domain))
                    .collect::<Result<Vec<_>>>()?;
                tuples.push(Tuple::new(values));
            }
            let before = body_len(catalog, table);
            let next = catalog.insert_all(table, tuples)?;
            let added = body_len(&next, table) - before;
            Ok((
                Some(next),
                StatementOutcome::Inserted {
                    name: table.clone(),
                    added,
                },
            ))
        }
        Statement::Select(q) => Ok((None, StatementOutcome::Rows(query_ast(catalog, q, budget)?))),
    }
}

fn body_len(catalog: &Catalog, name: &str) -> usize {
    match catalog.relation(name) {
        Some(RelationDef::Data { body, .. }) => body.len(),
        _ => 0,
    }
}

/// `SELECT * FROM COMPLETE(...) [WHERE p]` defines a sigma complete
/// relation; any other query is kept as a view.
fn view_definition(catalog: &Catalog, query: &SelectQuery) -> Result<RelationDef> {
    if let (Projection::All, Source::Complete(columns), true, None) =
        (&query.projection, &query.from, query.joins.is_empty(), query.limit)
    {
        let heading = catalog.resolve_columns(columns)?;
        if let Some(p) = &query.filter {
            Scope::new(None, &heading).bind_predicate(p)?;
        }
        return Ok(RelationDef::Sigma {
            heading,
            predicate: query.filter.clone(),
        });
    }
    lower_query(query, catalog)?;
    Ok(RelationDef::View { query: query.clone() })
}

/// Converts an INSERT literal to a value of `domain`. Range checks are
/// left to the catalog.
pub fn literal_scalar(lit: &Literal, domain: &DomainSpec) -> Result<Scalar> {
    let invalid = |value: String| -> Error {
        ModelError::InvalidValue {
            value,
            domain: domain.to_string(),
        }
        .into()
    };
    match (lit, domain) {
        (Literal::Bool(b), DomainSpec::Bool) => Ok(Scalar::Bool(*b)),
        (Literal::Number(r), DomainSpec::Int { .. }) if r.is_integer() => Ok(Scalar::Int(r.to_integer())),
        (Literal::Number(r), DomainSpec::Rat) => Ok(Scalar::Rat(r.clone())),
        (Literal::Str(s), DomainSpec::Enum(ty)) => EnumValue::named(ty, s)
            .map(Scalar::Enum)
            .ok_or_else(|| invalid(s.clone())),
        (Literal::Bool(b), _) => Err(invalid(b.to_string())),
        (Literal::Number(r), _) => Err(invalid(crate::model::format_rational(r))),
        (Literal::Str(s), _) => Err(invalid(s.clone())),
    }
}

fn query_ast(catalog: &Catalog, q: &SelectQuery, budget: &SolveBudget) -> Result<RelationResult> {
    let plan = optimize(&lower_query(q, catalog)?)?;
    execute(&plan, catalog, budget)
}

/// Parses and runs a single SELECT.
pub fn query(catalog: &Catalog, text: &str, budget: &SolveBudget) -> Result<RelationResult> {
    match parse_statement(text)? {
        Statement::Select(q) => query_ast(catalog, &q, budget),
        _ => Err(Error::NotAQuery(text.trim().chars().take(40).collect())),
    }
}

/// Parses and applies a single statement.
pub fn run_statement(
    catalog: &Catalog,
    text: &str,
    budget: &SolveBudget,
) -> Result<(Option<Catalog>, StatementOutcome)> {
    apply(catalog, &parse_statement(text)?, budget)
}
