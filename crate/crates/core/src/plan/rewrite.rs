use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::expr::PredicateExpr;
use crate::model::Heading;

use super::{CompleteScan, LogicalPlan};

/// Moves selections toward the leaves. Conjuncts that reach a complete
/// scan strengthen its constraint; conjuncts spanning both sides of a
/// product become join conditions. Idempotent.
pub fn pushdown(plan: &LogicalPlan) -> LogicalPlan {
    push(plan, Vec::new())
}

/// Rewrites joins that have a complete scan on one side. Two complete
/// scans merge into one; a data side becomes the outer input of a bind
/// join.
pub fn choose_bind_join(plan: &LogicalPlan) -> Result<LogicalPlan> {
    Ok(match plan {
        LogicalPlan::Scan { .. } | LogicalPlan::CompleteScan(_) => plan.clone(),
        LogicalPlan::Select { input, predicate } => LogicalPlan::select(choose_bind_join(input)?, predicate.clone()),
        LogicalPlan::Project { input, attrs } => LogicalPlan::project(choose_bind_join(input)?, attrs.clone()),
        LogicalPlan::Limit { input, count } => LogicalPlan::Limit {
            input: Box::new(choose_bind_join(input)?),
            count: *count,
        },
        LogicalPlan::CrossProduct { left, right } => bind(
            choose_bind_join(left)?,
            choose_bind_join(right)?,
            PredicateExpr::truth(true),
            true,
        )?,
        LogicalPlan::Join { left, right, on } => {
            bind(choose_bind_join(left)?, choose_bind_join(right)?, on.clone(), false)?
        }
        LogicalPlan::BindJoin { outer, inner, on } => LogicalPlan::BindJoin {
            outer: Box::new(choose_bind_join(outer)?),
            inner: inner.clone(),
            on: on.clone(),
        },
    })
}

/// Push-down, join selection, then push-down again so that conditions
/// exposed by merged scans settle into place.
pub fn optimize(plan: &LogicalPlan) -> Result<LogicalPlan> {
    Ok(pushdown(&choose_bind_join(&pushdown(plan))?))
}

fn bind(left: LogicalPlan, right: LogicalPlan, on: PredicateExpr, cross: bool) -> Result<LogicalPlan> {
    let rebuild = |left: LogicalPlan, right: LogicalPlan, on: PredicateExpr| {
        if cross {
            LogicalPlan::cross(left, right)
        } else {
            LogicalPlan::join(left, right, on)
        }
    };
    match (left, right) {
        (LogicalPlan::CompleteScan(l), LogicalPlan::CompleteScan(r)) => {
            let heading = concat(&l.heading, &r.heading)?;
            let constraint = conjoin([&l.constraint, &r.constraint, &on]);
            Ok(LogicalPlan::complete(heading, constraint))
        }
        (outer, LogicalPlan::CompleteScan(inner)) => {
            concat(&outer.heading()?, &inner.heading)?;
            Ok(LogicalPlan::BindJoin {
                outer: Box::new(outer),
                inner,
                on,
            })
        }
        (LogicalPlan::CompleteScan(inner), outer) => {
            let order = concat(&inner.heading, &outer.heading()?)?
                .names()
                .map(str::to_string)
                .collect();
            Ok(LogicalPlan::project(
                LogicalPlan::BindJoin {
                    outer: Box::new(outer),
                    inner,
                    on,
                },
                order,
            ))
        }
        (left, right) => Ok(rebuild(left, right, on)),
    }
}

fn concat(a: &Heading, b: &Heading) -> Result<Heading> {
    let mut seen: BTreeSet<&str> = a.names().collect();
    for n in b.names() {
        if !seen.insert(n) {
            return Err(Error::JoinNotGroundable(n.to_string()));
        }
    }
    Ok(a.concat(b)?)
}

fn conjoin<'a>(parts: impl IntoIterator<Item = &'a PredicateExpr>) -> PredicateExpr {
    PredicateExpr::and_all(
        parts
            .into_iter()
            .flat_map(|p| p.conjuncts())
            .filter(|c| !c.is_true())
            .cloned(),
    )
}

fn names(plan: &LogicalPlan) -> BTreeSet<String> {
    plan.heading()
        .map(|h| h.names().map(str::to_string).collect())
        .unwrap_or_default()
}

fn covered(p: &PredicateExpr, attrs: &BTreeSet<String>) -> bool {
    p.attrs().iter().all(|a| attrs.contains(*a))
}

fn wrap(plan: LogicalPlan, preds: Vec<PredicateExpr>) -> LogicalPlan {
    if preds.is_empty() {
        plan
    } else {
        LogicalPlan::select(plan, PredicateExpr::and_all(preds))
    }
}

/// Splits `preds` into those over the left side only, the right side
/// only, and the rest.
fn route(
    preds: Vec<PredicateExpr>,
    left: &BTreeSet<String>,
    right: &BTreeSet<String>,
) -> (Vec<PredicateExpr>, Vec<PredicateExpr>, Vec<PredicateExpr>) {
    let (mut l, mut r, mut both) = (Vec::new(), Vec::new(), Vec::new());
    for p in preds {
        if covered(&p, left) {
            l.push(p);
        } else if covered(&p, right) {
            r.push(p);
        } else {
            both.push(p);
        }
    }
    (l, r, both)
}

fn split(p: &PredicateExpr) -> impl Iterator<Item = PredicateExpr> + '_ {
    p.conjuncts().into_iter().filter(|c| !c.is_true()).cloned()
}

fn push(plan: &LogicalPlan, mut preds: Vec<PredicateExpr>) -> LogicalPlan {
    match plan {
        LogicalPlan::Select { input, predicate } => {
            preds.extend(split(predicate));
            push(input, preds)
        }
        LogicalPlan::CompleteScan(cs) => {
            let mut all: Vec<PredicateExpr> = split(&cs.constraint).collect();
            all.extend(preds);
            LogicalPlan::CompleteScan(CompleteScan {
                heading: cs.heading.clone(),
                constraint: PredicateExpr::and_all(all),
            })
        }
        LogicalPlan::Scan { .. } => wrap(plan.clone(), preds),
        LogicalPlan::Limit { input, count } => wrap(
            LogicalPlan::Limit {
                input: Box::new(push(input, Vec::new())),
                count: *count,
            },
            preds,
        ),
        LogicalPlan::Project { input, attrs } => LogicalPlan::project(push(input, preds), attrs.clone()),
        LogicalPlan::CrossProduct { left, right } => {
            let (l, r, both) = route(preds, &names(left), &names(right));
            let (left, right) = (push(left, l), push(right, r));
            if both.is_empty() {
                LogicalPlan::cross(left, right)
            } else {
                LogicalPlan::join(left, right, PredicateExpr::and_all(both))
            }
        }
        LogicalPlan::Join { left, right, on } => {
            preds.extend(split(on));
            let (l, r, both) = route(preds, &names(left), &names(right));
            LogicalPlan::join(push(left, l), push(right, r), PredicateExpr::and_all(both))
        }
        LogicalPlan::BindJoin { outer, inner, on } => {
            preds.extend(split(on));
            let inner_names = inner.heading.names().map(str::to_string).collect();
            let (l, r, both) = route(preds, &names(outer), &inner_names);
            let mut constraint: Vec<PredicateExpr> = split(&inner.constraint).collect();
            constraint.extend(r);
            LogicalPlan::BindJoin {
                outer: Box::new(push(outer, l)),
                inner: CompleteScan {
                    heading: inner.heading.clone(),
                    constraint: PredicateExpr::and_all(constraint),
                },
                on: PredicateExpr::and_all(both),
            }
        }
    }
}
