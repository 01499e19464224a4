//! Plan evaluation over a catalog snapshot.

mod probe;
mod statement;

pub use probe::{effectiveness_probe, effectiveness_report, listability, probe_value, Effectiveness};
pub use statement::{apply, literal_scalar, query, run_statement, StatementOutcome};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::expr::{PredicateExpr, Row};
use crate::lang::ast::BinaryOp;
use crate::model::{Catalog, Heading, ModelError, RelationDef, Scalar, Tuple};
use crate::plan::{CompleteScan, LogicalPlan};
use crate::solver::{solve_predicate, SolveBudget, SolveOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultStatus {
    Complete,
    /// A LIMIT dropped rows.
    Truncated {
        limit: u64,
    },
}

/// A query answer: tuples in canonical order under their heading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationResult {
    pub heading: Heading,
    pub tuples: BTreeSet<Tuple>,
    pub status: ResultStatus,
}

impl RelationResult {
    fn complete(heading: Heading, tuples: BTreeSet<Tuple>) -> Self {
        RelationResult {
            heading,
            tuples,
            status: ResultStatus::Complete,
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Evaluates `e` against one tuple of `heading`.
pub fn evaluate_expr(e: &PredicateExpr, heading: &Heading, tuple: &Tuple) -> Result<Scalar> {
    Ok(e.eval(&Row { heading, tuple })?)
}

fn test(e: &PredicateExpr, heading: &Heading, tuple: &Tuple) -> Result<bool> {
    match evaluate_expr(e, heading, tuple)? {
        Scalar::Bool(b) => Ok(b),
        other => Err(Error::Eval(crate::expr::EvalError::TypeMismatch(format!(
            "predicate produced {other}"
        )))),
    }
}

pub fn execute(plan: &LogicalPlan, catalog: &Catalog, budget: &SolveBudget) -> Result<RelationResult> {
    match plan {
        LogicalPlan::Scan { relation, heading } => match catalog.relation(relation) {
            Some(RelationDef::Data { body, .. }) => Ok(RelationResult::complete(heading.clone(), body.clone())),
            _ => Err(ModelError::UnknownReference(relation.clone()).into()),
        },
        LogicalPlan::CompleteScan(cs) => Ok(RelationResult::complete(cs.heading.clone(), solve_scan(cs, budget)?)),
        LogicalPlan::Select { input, predicate } => {
            let mut r = execute(input, catalog, budget)?;
            let mut kept = BTreeSet::new();
            for t in std::mem::take(&mut r.tuples) {
                if test(predicate, &r.heading, &t)? {
                    kept.insert(t);
                }
            }
            r.tuples = kept;
            Ok(r)
        }
        LogicalPlan::Project { input, attrs } => {
            let r = execute(input, catalog, budget)?;
            let heading = r.heading.project(attrs)?;
            let positions: Vec<usize> = attrs
                .iter()
                .map(|a| r.heading.index_of(a).expect("projected attribute exists"))
                .collect();
            let tuples = r
                .tuples
                .iter()
                .map(|t| Tuple::new(positions.iter().map(|&i| t.values()[i].clone()).collect()))
                .collect();
            Ok(RelationResult {
                heading,
                tuples,
                status: r.status,
            })
        }
        LogicalPlan::CrossProduct { left, right } => {
            nested_loop(left, right, &PredicateExpr::truth(true), catalog, budget)
        }
        LogicalPlan::Join { left, right, on } => nested_loop(left, right, on, catalog, budget),
        LogicalPlan::BindJoin { outer, inner, on } => bind_join(outer, inner, on, catalog, budget),
        LogicalPlan::Limit { input, count } => {
            let r = execute(input, catalog, budget)?;
            let n = usize::try_from(*count).unwrap_or(usize::MAX);
            if r.tuples.len() <= n {
                return Ok(r);
            }
            Ok(RelationResult {
                heading: r.heading,
                tuples: r.tuples.into_iter().take(n).collect(),
                status: ResultStatus::Truncated { limit: *count },
            })
        }
    }
}

fn solve_scan(cs: &CompleteScan, budget: &SolveBudget) -> Result<BTreeSet<Tuple>> {
    match solve_predicate(&cs.heading, &cs.constraint, budget) {
        SolveOutcome::AllSolutions(t) => Ok(t),
        SolveOutcome::Infinite { attribute } => Err(Error::InfiniteExtension { attribute }),
        SolveOutcome::BudgetExceeded(limit) => Err(Error::BudgetExceeded(limit)),
    }
}

fn status(a: ResultStatus, b: ResultStatus) -> ResultStatus {
    match (a, b) {
        (ResultStatus::Complete, s) | (s, ResultStatus::Complete) => s,
        (s, _) => s,
    }
}

fn nested_loop(
    left: &LogicalPlan,
    right: &LogicalPlan,
    on: &PredicateExpr,
    catalog: &Catalog,
    budget: &SolveBudget,
) -> Result<RelationResult> {
    let l = execute(left, catalog, budget)?;
    let r = execute(right, catalog, budget)?;
    let heading = l.heading.concat(&r.heading)?;
    let mut tuples = BTreeSet::new();
    for a in &l.tuples {
        for b in &r.tuples {
            let t = a.concat(b);
            if on.is_true() || test(on, &heading, &t)? {
                tuples.insert(t);
            }
        }
    }
    Ok(RelationResult {
        heading,
        tuples,
        status: status(l.status, r.status),
    })
}

/// Splits the ON condition of a bind join. Equalities with one side over
/// outer attributes only and the other over inner attributes only ground
/// the inner scan; conjuncts over inner attributes only join its
/// constraint; everything else filters the joined tuples.
struct BindSplit<'a> {
    groundings: Vec<(&'a PredicateExpr, &'a PredicateExpr)>,
    inner_only: Vec<&'a PredicateExpr>,
    residual: Vec<&'a PredicateExpr>,
}

fn split_on<'a>(on: &'a PredicateExpr, outer: &Heading, inner: &Heading) -> BindSplit<'a> {
    let within = |e: &PredicateExpr, h: &Heading| e.attrs().iter().all(|a| h.index_of(a).is_some());
    let touches = |e: &PredicateExpr| !e.attrs().is_empty();
    let mut split = BindSplit {
        groundings: Vec::new(),
        inner_only: Vec::new(),
        residual: Vec::new(),
    };
    for c in on.conjuncts() {
        if c.is_true() {
            continue;
        }
        if let PredicateExpr::Binary(BinaryOp::Eq, l, r) = c {
            if within(l, outer) && touches(r) && within(r, inner) {
                split.groundings.push((l, r));
                continue;
            }
            if within(r, outer) && touches(l) && within(l, inner) {
                split.groundings.push((r, l));
                continue;
            }
        }
        if within(c, inner) {
            split.inner_only.push(c);
        } else {
            split.residual.push(c);
        }
    }
    split
}

fn bind_join(
    outer: &LogicalPlan,
    inner: &CompleteScan,
    on: &PredicateExpr,
    catalog: &Catalog,
    budget: &SolveBudget,
) -> Result<RelationResult> {
    let o = execute(outer, catalog, budget)?;
    let heading = o.heading.concat(&inner.heading)?;
    let split = split_on(on, &o.heading, &inner.heading);
    let mut base: Vec<PredicateExpr> = inner.constraint.conjuncts().into_iter().cloned().collect();
    base.extend(split.inner_only.iter().map(|c| (*c).clone()));
    let mut tuples = BTreeSet::new();
    for t in &o.tuples {
        let row = Row {
            heading: &o.heading,
            tuple: t,
        };
        let mut constraint = base.clone();
        for (outer_side, inner_side) in &split.groundings {
            constraint.push(PredicateExpr::eq(outer_side.substitute(&row), (*inner_side).clone()));
        }
        let scan = CompleteScan {
            heading: inner.heading.clone(),
            constraint: PredicateExpr::and_all(constraint),
        };
        for s in solve_scan(&scan, budget)? {
            let joined = t.concat(&s);
            let mut keep = true;
            for c in &split.residual {
                if !test(c, &heading, &joined)? {
                    keep = false;
                    break;
                }
            }
            if keep {
                tuples.insert(joined);
            }
        }
    }
    Ok(RelationResult {
        heading,
        tuples,
        status: o.status,
    })
}
