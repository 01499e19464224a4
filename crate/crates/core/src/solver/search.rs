//! Depth-first enumeration of all solutions.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use super::domain::VarDomain;
use super::linear::{LinearForm, Polyhedron, Relation, TooLarge};
use super::normalize::{normalize, Atom, ConstraintNF};
use super::propagate::{first_fail, propagate};
use crate::expr::PredicateExpr;
use crate::model::{Heading, Scalar, Tuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveBudget {
    pub max_solutions: usize,
    pub max_nodes: u64,
    pub timeout: Duration,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget {
            max_solutions: 10_000,
            max_nodes: 1_000_000,
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BudgetLimit {
    Solutions,
    Nodes,
    Timeout,
    /// A non-linear constraint never became decidable.
    OpaqueStall,
    /// Projection of the linear system grew too large.
    Elimination,
}

impl fmt::Display for BudgetLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetLimit::Solutions => "max_solutions",
            BudgetLimit::Nodes => "max_nodes",
            BudgetLimit::Timeout => "timeout",
            BudgetLimit::OpaqueStall => "opaque_stall",
            BudgetLimit::Elimination => "elimination_size",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Every solution, in canonical order.
    AllSolutions(BTreeSet<Tuple>),
    /// The extension is infinite; `attribute` takes infinitely many values.
    Infinite {
        attribute: String,
    },
    BudgetExceeded(BudgetLimit),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    /// Search nodes visited, the root included.
    pub nodes: u64,
    /// Choice points: nodes where the search had to try alternatives.
    pub branches: u64,
}

pub fn solve_all(heading: &Heading, nf: &ConstraintNF, budget: &SolveBudget) -> SolveOutcome {
    solve_with_stats(heading, nf, budget).0
}

pub fn solve_predicate(heading: &Heading, p: &PredicateExpr, budget: &SolveBudget) -> SolveOutcome {
    solve_all(heading, &normalize(p, heading), budget)
}

pub fn solve_with_stats(heading: &Heading, nf: &ConstraintNF, budget: &SolveBudget) -> (SolveOutcome, SolveStats) {
    let mut search = Search {
        heading,
        original: nf,
        budget,
        started: Instant::now(),
        stats: SolveStats::default(),
        found: BTreeSet::new(),
    };
    let domains: Vec<VarDomain> = heading.attrs().iter().map(|a| VarDomain::full(&a.domain)).collect();
    let outcome = match search.node(domains, nf.clone()) {
        Ok(()) => SolveOutcome::AllSolutions(std::mem::take(&mut search.found)),
        Err(Stop::Infinite(i)) => SolveOutcome::Infinite {
            attribute: heading.attrs()[i].name.clone(),
        },
        Err(Stop::Budget(limit)) => SolveOutcome::BudgetExceeded(limit),
    };
    (outcome, search.stats)
}

enum Stop {
    Infinite(usize),
    Budget(BudgetLimit),
}

impl From<TooLarge> for Stop {
    fn from(_: TooLarge) -> Self {
        Stop::Budget(BudgetLimit::Elimination)
    }
}

struct Search<'a> {
    heading: &'a Heading,
    original: &'a ConstraintNF,
    budget: &'a SolveBudget,
    started: Instant,
    stats: SolveStats,
    found: BTreeSet<Tuple>,
}

impl Search<'_> {
    fn node(&mut self, mut d: Vec<VarDomain>, mut nf: ConstraintNF) -> Result<(), Stop> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.budget.max_nodes {
            return Err(Stop::Budget(BudgetLimit::Nodes));
        }
        if self.started.elapsed() > self.budget.timeout {
            return Err(Stop::Budget(BudgetLimit::Timeout));
        }
        if propagate(self.heading, &mut d, &mut nf).is_err() {
            return Ok(());
        }
        if let Some(var) = first_fail(&d) {
            self.stats.branches += 1;
            let mut rest = d;
            while let Some(v) = rest[var].first() {
                let mut child = rest.clone();
                if child[var].fix(&v).is_ok() {
                    self.node(child, nf.clone())?;
                }
                if rest[var].exclude(&v).is_err() {
                    break;
                }
            }
            return Ok(());
        }
        if let Some(pos) = nf.atoms.iter().position(|a| matches!(a, Atom::Disjunction(_))) {
            self.stats.branches += 1;
            let Atom::Disjunction(mut branches) = nf.atoms.remove(pos) else {
                unreachable!("position matched a disjunction")
            };
            let first = branches.remove(0);
            let mut left = nf.clone();
            left.atoms.extend(first.atoms);
            self.node(d.clone(), left)?;
            nf.atoms.extend(ConstraintNF::any(branches).atoms);
            return self.node(d, nf);
        }
        self.leaf(d, nf)
    }

    /// Every finite attribute is fixed and no disjunction is left.
    fn leaf(&mut self, mut d: Vec<VarDomain>, nf: ConstraintNF) -> Result<(), Stop> {
        let unfixed: Vec<usize> = (0..d.len()).filter(|i| !d[*i].is_fixed()).collect();
        if unfixed.is_empty() {
            let values: Vec<Scalar> = d.iter().map(|v| v.fixed().expect("all fixed")).collect();
            if self.original.holds(&values, self.heading) {
                self.found.insert(Tuple::new(values));
                if self.found.len() > self.budget.max_solutions {
                    return Err(Stop::Budget(BudgetLimit::Solutions));
                }
            }
            return Ok(());
        }
        if nf.atoms.iter().any(|a| matches!(a, Atom::Opaque { .. })) {
            return Err(Stop::Budget(BudgetLimit::OpaqueStall));
        }
        let fixed = |i: usize| d[i].fixed_number();
        let mut poly = Polyhedron::new();
        let mut excluded: Vec<LinearForm> = Vec::new();
        for atom in &nf.atoms {
            match atom {
                Atom::LinearEq(f) => poly.add(f.substitute_values(fixed), Relation::Eq),
                Atom::LinearIneq { form, strict } => poly.add(
                    form.substitute_values(fixed),
                    if *strict { Relation::Lt } else { Relation::Le },
                ),
                Atom::NotEqual(f) => excluded.push(f.substitute_values(fixed)),
                _ => {}
            }
        }
        for &i in &unfixed {
            let x = LinearForm::var(i);
            if let Some(b) = d[i].lower() {
                let rel = if b.strict { Relation::Lt } else { Relation::Le };
                poly.add(LinearForm::constant(b.value).sub(&x), rel);
            }
            if let Some(b) = d[i].upper() {
                let rel = if b.strict { Relation::Lt } else { Relation::Le };
                poly.add(x.sub(&LinearForm::constant(b.value)), rel);
            }
            if let VarDomain::Rat(super::domain::RatDomain::Range { excluded: ex, .. }) = &d[i] {
                excluded.extend(ex.iter().map(|v| x.sub(&LinearForm::constant(v.clone()))));
            }
        }
        if !poly.feasible()? {
            return Ok(());
        }
        let mut point = Vec::with_capacity(unfixed.len());
        for &i in &unfixed {
            let range = poly.range_of(&LinearForm::var(i))?.expect("feasible");
            if !range.is_point() {
                // A set of dimension ≥ 1 stays infinite after removing finitely
                // many hyperplanes, unless one of them contains all of it.
                for g in &excluded {
                    if let Some(r) = poly.range_of(g)? {
                        if r.is_point() && r.lo.as_ref().is_some_and(|b| b.value == num_traits::Zero::zero()) {
                            return Ok(());
                        }
                    }
                }
                return Err(Stop::Infinite(i));
            }
            point.push((i, range.lo.expect("point").value));
        }
        for (i, v) in point {
            if d[i].fix_number(&v).is_err() {
                return Ok(());
            }
        }
        self.node(d, nf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Scope;
    use crate::lang::parse_expr;
    use crate::model::{Attribute, DomainSpec};

    fn solve(h: &Heading, text: &str) -> (SolveOutcome, SolveStats) {
        let p = Scope::new(None, h).bind_predicate(&parse_expr(text).unwrap()).unwrap();
        solve_with_stats(h, &normalize(&p, h), &SolveBudget::default())
    }

    fn gst() -> Heading {
        Heading::new(vec![
            Attribute::new("Price", DomainSpec::Rat),
            Attribute::new("ExGSTAmount", DomainSpec::Rat),
            Attribute::new("GSTAmount", DomainSpec::Rat),
        ])
        .unwrap()
    }

    const GST: &str = "GSTAmount = Price / 11 AND ExGSTAmount = Price - GSTAmount";

    #[test]
    fn gst_is_not_listable_without_grounding() {
        let (out, _) = solve(&gst(), GST);
        assert_eq!(
            out,
            SolveOutcome::Infinite {
                attribute: "Price".into()
            }
        );
    }

    #[test]
    fn each_grounding_of_gst_gives_one_tuple_without_search() {
        let row = Tuple::new(vec![Scalar::rat(110, 1), Scalar::rat(100, 1), Scalar::rat(10, 1)]);
        for g in ["Price = 110", "ExGSTAmount = 100", "GSTAmount = 10"] {
            let (out, stats) = solve(&gst(), &format!("{GST} AND {g}"));
            assert_eq!(out, SolveOutcome::AllSolutions([row.clone()].into()), "{g}");
            assert_eq!(stats.branches, 0, "{g}");
        }
    }

    #[test]
    fn two_booleans_that_differ() {
        let h = Heading::new(vec![
            Attribute::new("x", DomainSpec::Bool),
            Attribute::new("y", DomainSpec::Bool),
        ])
        .unwrap();
        let (out, _) = solve(&h, "x <> y");
        let expected = [
            Tuple::new(vec![Scalar::Bool(false), Scalar::Bool(true)]),
            Tuple::new(vec![Scalar::Bool(true), Scalar::Bool(false)]),
        ];
        assert_eq!(out, SolveOutcome::AllSolutions(expected.into()));
    }

    #[test]
    fn open_interval_is_infinite_and_a_point_is_not() {
        let h = Heading::new(vec![Attribute::new("r", DomainSpec::Rat)]).unwrap();
        assert!(matches!(solve(&h, "r > 0 AND r < 1").0, SolveOutcome::Infinite { .. }));
        assert_eq!(
            solve(&h, "r > 1 AND r < 1").0,
            SolveOutcome::AllSolutions(BTreeSet::new())
        );
        let h2 = Heading::new(vec![
            Attribute::new("a", DomainSpec::Rat),
            Attribute::new("b", DomainSpec::Rat),
        ])
        .unwrap();
        let (out, _) = solve(&h2, "a + b <= 2 AND a + b >= 2 AND a - b = 0");
        assert_eq!(
            out,
            SolveOutcome::AllSolutions([Tuple::new(vec![Scalar::rat(1, 1), Scalar::rat(1, 1)])].into())
        );
    }

    #[test]
    fn nonlinear_rational_constraints_stall() {
        let h = Heading::new(vec![
            Attribute::new("a", DomainSpec::Rat),
            Attribute::new("b", DomainSpec::Rat),
        ])
        .unwrap();
        assert_eq!(
            solve(&h, "a * b = 1").0,
            SolveOutcome::BudgetExceeded(BudgetLimit::OpaqueStall)
        );
    }

    #[test]
    fn budgets_are_enforced() {
        let h = Heading::new(vec![Attribute::new("x", DomainSpec::int(0, 999).unwrap())]).unwrap();
        let p = PredicateExpr::truth(true);
        let tight = SolveBudget {
            max_solutions: 10,
            ..SolveBudget::default()
        };
        assert_eq!(
            solve_predicate(&h, &p, &tight),
            SolveOutcome::BudgetExceeded(BudgetLimit::Solutions)
        );
        let nodes = SolveBudget {
            max_nodes: 5,
            ..SolveBudget::default()
        };
        assert_eq!(
            solve_predicate(&h, &p, &nodes),
            SolveOutcome::BudgetExceeded(BudgetLimit::Nodes)
        );
    }
}
