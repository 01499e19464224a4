//! Effectiveness: which groundings make a complete relation listable.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Error;
use crate::expr::PredicateExpr;
use crate::lang::ast::{SelectQuery, Source};
use crate::model::{Catalog, DomainSpec, EnumValue, Scalar};
use crate::plan::{lower_query, optimize, CompleteScan};
use crate::solver::{solve_predicate, SolveBudget, SolveOutcome};

use super::execute;

/// Subsets examined by `effectiveness_report` at most.
pub const MAX_REPORT_SUBSETS: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Effectiveness {
    Finite,
    Infinite,
    /// The budget ran out before the solver could tell.
    Unknown,
}

impl Effectiveness {
    pub fn as_str(self) -> &'static str {
        match self {
            Effectiveness::Finite => "finite",
            Effectiveness::Infinite => "infinite",
            Effectiveness::Unknown => "unknown",
        }
    }
}

/// Representative value used to ground an attribute: the middle of a
/// finite domain, or 1 for rationals.
pub fn probe_value(domain: &DomainSpec) -> Scalar {
    match domain {
        DomainSpec::Bool => Scalar::Bool(true),
        DomainSpec::Int { lo, hi } => Scalar::Int((BigInt::from(*lo) + BigInt::from(*hi)) / 2),
        DomainSpec::Enum(ty) => {
            Scalar::Enum(EnumValue::new(ty, ty.values().len() / 2).expect("enum types are non-empty"))
        }
        DomainSpec::Rat => Scalar::Rat(BigRational::from_integer(1.into())),
    }
}

/// Grounds each attribute of `grounded` to its probe value and asks
/// whether the resulting extension is finite. A relation whose free
/// attributes all have finite domains is finite without solving.
pub fn effectiveness_probe(scan: &CompleteScan, grounded: &[&str], budget: &SolveBudget) -> Effectiveness {
    let free_finite = scan
        .heading
        .attrs()
        .iter()
        .all(|a| grounded.contains(&a.name.as_str()) || a.domain.is_finite());
    if free_finite {
        return Effectiveness::Finite;
    }
    let mut conjuncts: Vec<PredicateExpr> = scan.constraint.conjuncts().into_iter().cloned().collect();
    for name in grounded {
        let Some(attr) = scan.heading.get(name) else {
            continue;
        };
        conjuncts.push(PredicateExpr::eq(
            PredicateExpr::attr(*name),
            PredicateExpr::Const(probe_value(&attr.domain)),
        ));
    }
    match solve_predicate(&scan.heading, &PredicateExpr::and_all(conjuncts), budget) {
        SolveOutcome::AllSolutions(_) => Effectiveness::Finite,
        SolveOutcome::Infinite { .. } => Effectiveness::Infinite,
        SolveOutcome::BudgetExceeded(_) => Effectiveness::Unknown,
    }
}

/// Probes every subset of the heading, smallest subsets first, up to
/// `MAX_REPORT_SUBSETS` of them.
pub fn effectiveness_report(scan: &CompleteScan, budget: &SolveBudget) -> Vec<(Vec<String>, Effectiveness)> {
    let names: Vec<&str> = scan.heading.names().collect();
    let n = names.len().min(63);
    let mut masks: Vec<u64> = (0..(1u64 << n)).take(MAX_REPORT_SUBSETS).collect();
    if n <= 12 {
        masks.sort_by_key(|m| (m.count_ones(), *m));
    }
    masks
        .into_iter()
        .map(|m| {
            let subset: Vec<&str> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| names[i]).collect();
            let e = effectiveness_probe(scan, &subset, budget);
            (subset.into_iter().map(str::to_string).collect(), e)
        })
        .collect()
}

/// Whether `SELECT * FROM name` has a finite answer within the budget.
pub fn listability(catalog: &Catalog, name: &str, budget: &SolveBudget) -> Effectiveness {
    let q = SelectQuery::star(Source::Named(name.to_string()));
    let result = lower_query(&q, catalog)
        .and_then(|p| optimize(&p))
        .and_then(|p| execute(&p, catalog, budget));
    match result {
        Ok(_) => Effectiveness::Finite,
        Err(Error::InfiniteExtension { .. }) => Effectiveness::Infinite,
        Err(_) => Effectiveness::Unknown,
    }
}
