use crate::error::{Error, Result};
use crate::expr::{PredicateExpr, Scope};
use crate::lang::ast::{Projection, SelectQuery, Source, Statement};
use crate::model::{Catalog, ModelError, RelationDef};

use super::LogicalPlan;

/// Lowers a SELECT statement against `catalog`, inlining views.
pub fn lower(stmt: &Statement, catalog: &Catalog) -> Result<LogicalPlan> {
    match stmt {
        Statement::Select(q) => lower_query(q, catalog),
        other => Err(Error::NotAQuery(statement_name(other).to_string())),
    }
}

pub fn lower_query(q: &SelectQuery, catalog: &Catalog) -> Result<LogicalPlan> {
    Ok(lower_scoped(q, catalog)?.0)
}

fn statement_name(s: &Statement) -> &'static str {
    match s {
        Statement::CreateTable { .. } => "CREATE TABLE",
        Statement::CreateEnum { .. } => "CREATE TYPE",
        Statement::Insert { .. } => "INSERT",
        Statement::CreateView { .. } => "CREATE VIEW",
        Statement::Select(_) => "SELECT",
    }
}

pub(crate) fn lower_scoped(q: &SelectQuery, catalog: &Catalog) -> Result<(LogicalPlan, Scope)> {
    let (mut plan, mut scope) = lower_source(&q.from, catalog)?;
    let inline_complete = q.joins.is_empty() && matches!(q.from, Source::Complete(_));

    for join in &q.joins {
        let (right, right_scope) = lower_source(&join.source, catalog)?;
        let joined = scope.joined(&right_scope);
        if let Err(ModelError::DuplicateAttribute(a)) = joined.heading() {
            return Err(if plan.complete_scans() + right.complete_scans() > 0 {
                Error::JoinNotGroundable(a)
            } else {
                Error::Model(ModelError::DuplicateAttribute(a))
            });
        }
        let on = joined.bind_predicate(&join.on)?;
        plan = LogicalPlan::join(plan, right, on);
        scope = joined;
    }

    if let Some(filter) = &q.filter {
        let predicate = scope.bind_predicate(filter)?;
        plan = match plan {
            LogicalPlan::CompleteScan(mut cs) if inline_complete => {
                cs.constraint = PredicateExpr::and_all(
                    cs.constraint
                        .conjuncts()
                        .into_iter()
                        .chain(predicate.conjuncts())
                        .filter(|c| !c.is_true())
                        .cloned(),
                );
                LogicalPlan::CompleteScan(cs)
            }
            other => LogicalPlan::select(other, predicate),
        };
    }

    if let Projection::Columns(cols) = &q.projection {
        let mut names = Vec::with_capacity(cols.len());
        for c in cols {
            names.push(scope.resolve(c)?.name.clone());
        }
        let heading = scope.heading()?.project(&names)?;
        scope = Scope::new(None, &heading);
        plan = LogicalPlan::project(plan, names);
    }

    if let Some(n) = q.limit {
        plan = LogicalPlan::Limit {
            input: Box::new(plan),
            count: n,
        };
    }
    Ok((plan, scope))
}

fn lower_source(src: &Source, catalog: &Catalog) -> Result<(LogicalPlan, Scope)> {
    match src {
        Source::Complete(cols) => {
            let heading = catalog.resolve_columns(cols)?;
            let scope = Scope::new(None, &heading);
            Ok((LogicalPlan::complete(heading, PredicateExpr::truth(true)), scope))
        }
        Source::Named(name) => match catalog.relation(name) {
            Some(RelationDef::Data { heading, .. }) => Ok((
                LogicalPlan::Scan {
                    relation: name.clone(),
                    heading: heading.clone(),
                },
                Scope::new(Some(name), heading),
            )),
            Some(RelationDef::Sigma { heading, predicate }) => {
                let constraint = match predicate {
                    Some(p) => Scope::new(None, heading).bind_predicate(p)?,
                    None => PredicateExpr::truth(true),
                };
                Ok((
                    LogicalPlan::complete(heading.clone(), constraint),
                    Scope::new(Some(name), heading),
                ))
            }
            Some(RelationDef::View { query }) => {
                let (plan, scope) = lower_scoped(query, catalog)?;
                Ok((plan, scope.requalified(name)))
            }
            None => Err(ModelError::UnknownReference(name.clone()).into()),
        },
    }
}
