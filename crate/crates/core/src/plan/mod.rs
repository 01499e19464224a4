//! Relational algebra plans: lowering from the syntax tree and rewrites.

mod lower;
mod rewrite;

pub use lower::{lower, lower_query};
pub use rewrite::{choose_bind_join, optimize, pushdown};

use std::fmt;

use crate::expr::PredicateExpr;
use crate::model::Heading;

/// A complete relation restricted by a constraint. Its extension is
/// every tuple over `heading` that satisfies `constraint`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteScan {
    pub heading: Heading,
    pub constraint: PredicateExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogicalPlan {
    Scan {
        relation: String,
        heading: Heading,
    },
    CompleteScan(CompleteScan),
    Select {
        input: Box<LogicalPlan>,
        predicate: PredicateExpr,
    },
    Project {
        input: Box<LogicalPlan>,
        attrs: Vec<String>,
    },
    CrossProduct {
        left: Box<LogicalPlan>,
        right: Box<LogicalPlan>,
    },
    Join {
        left: Box<LogicalPlan>,
        right: Box<LogicalPlan>,
        on: PredicateExpr,
    },
    /// For each outer tuple, ground the inner complete scan and solve it.
    BindJoin {
        outer: Box<LogicalPlan>,
        inner: CompleteScan,
        on: PredicateExpr,
    },
    Limit {
        input: Box<LogicalPlan>,
        count: u64,
    },
}

impl LogicalPlan {
    pub fn complete(heading: Heading, constraint: PredicateExpr) -> Self {
        LogicalPlan::CompleteScan(CompleteScan { heading, constraint })
    }

    pub fn select(input: LogicalPlan, predicate: PredicateExpr) -> Self {
        LogicalPlan::Select {
            input: Box::new(input),
            predicate,
        }
    }

    pub fn project(input: LogicalPlan, attrs: Vec<String>) -> Self {
        LogicalPlan::Project {
            input: Box::new(input),
            attrs,
        }
    }

    pub fn join(left: LogicalPlan, right: LogicalPlan, on: PredicateExpr) -> Self {
        LogicalPlan::Join {
            left: Box::new(left),
            right: Box::new(right),
            on,
        }
    }

    pub fn cross(left: LogicalPlan, right: LogicalPlan) -> Self {
        LogicalPlan::CrossProduct {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Output heading. Plans built by `lower` and the rewrites never have
    /// clashing names, so this only fails on hand-built plans.
    pub fn heading(&self) -> crate::Result<Heading> {
        Ok(match self {
            LogicalPlan::Scan { heading, .. } => heading.clone(),
            LogicalPlan::CompleteScan(cs) => cs.heading.clone(),
            LogicalPlan::Select { input, .. } | LogicalPlan::Limit { input, .. } => input.heading()?,
            LogicalPlan::Project { input, attrs } => input.heading()?.project(attrs)?,
            LogicalPlan::CrossProduct { left, right } | LogicalPlan::Join { left, right, .. } => {
                left.heading()?.concat(&right.heading()?)?
            }
            LogicalPlan::BindJoin { outer, inner, .. } => outer.heading()?.concat(&inner.heading)?,
        })
    }

    /// Number of complete scans in the tree.
    pub fn complete_scans(&self) -> usize {
        match self {
            LogicalPlan::Scan { .. } => 0,
            LogicalPlan::CompleteScan(_) => 1,
            LogicalPlan::Select { input, .. }
            | LogicalPlan::Project { input, .. }
            | LogicalPlan::Limit { input, .. } => input.complete_scans(),
            LogicalPlan::CrossProduct { left, right } | LogicalPlan::Join { left, right, .. } => {
                left.complete_scans() + right.complete_scans()
            }
            LogicalPlan::BindJoin { outer, .. } => outer.complete_scans() + 1,
        }
    }

    /// All predicate conjuncts held anywhere in the plan, with literal
    /// `true` left out.
    pub fn conjuncts(&self) -> Vec<&PredicateExpr> {
        let mut out = Vec::new();
        self.collect_conjuncts(&mut out);
        out
    }

    fn collect_conjuncts<'a>(&'a self, out: &mut Vec<&'a PredicateExpr>) {
        let mut add = |p: &'a PredicateExpr| out.extend(p.conjuncts().into_iter().filter(|c| !c.is_true()));
        match self {
            LogicalPlan::Scan { .. } => {}
            LogicalPlan::CompleteScan(cs) => add(&cs.constraint),
            LogicalPlan::Select { input, predicate } => {
                add(predicate);
                input.collect_conjuncts(out);
            }
            LogicalPlan::Project { input, .. } | LogicalPlan::Limit { input, .. } => input.collect_conjuncts(out),
            LogicalPlan::CrossProduct { left, right } => {
                left.collect_conjuncts(out);
                right.collect_conjuncts(out);
            }
            LogicalPlan::Join { left, right, on } => {
                add(on);
                left.collect_conjuncts(out);
                right.collect_conjuncts(out);
            }
            LogicalPlan::BindJoin { outer, inner, on } => {
                add(on);
                add(&inner.constraint);
                outer.collect_conjuncts(out);
            }
        }
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            LogicalPlan::Scan { relation, heading } => writeln!(f, "{pad}Scan {relation} {heading}"),
            LogicalPlan::CompleteScan(cs) => {
                writeln!(f, "{pad}CompleteScan {} WHERE {}", cs.heading, cs.constraint)
            }
            LogicalPlan::Select { input, predicate } => {
                writeln!(f, "{pad}Select {predicate}")?;
                input.fmt_indented(f, depth + 1)
            }
            LogicalPlan::Project { input, attrs } => {
                writeln!(f, "{pad}Project {}", attrs.join(", "))?;
                input.fmt_indented(f, depth + 1)
            }
            LogicalPlan::CrossProduct { left, right } => {
                writeln!(f, "{pad}CrossProduct")?;
                left.fmt_indented(f, depth + 1)?;
                right.fmt_indented(f, depth + 1)
            }
            LogicalPlan::Join { left, right, on } => {
                writeln!(f, "{pad}Join ON {on}")?;
                left.fmt_indented(f, depth + 1)?;
                right.fmt_indented(f, depth + 1)
            }
            LogicalPlan::BindJoin { outer, inner, on } => {
                writeln!(f, "{pad}BindJoin ON {on}")?;
                outer.fmt_indented(f, depth + 1)?;
                LogicalPlan::CompleteScan(inner.clone()).fmt_indented(f, depth + 1)
            }
            LogicalPlan::Limit { input, count } => {
                writeln!(f, "{pad}Limit {count}")?;
                input.fmt_indented(f, depth + 1)
            }
        }
    }
}

/// One node per line, children indented by two spaces.
impl fmt::Display for LogicalPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}
