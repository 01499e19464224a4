//! Enumerates the extension of a constrained complete relation.
//!
//! Predicates are normalized into linear and logical atoms, domains are
//! narrowed by propagation and exact Gaussian elimination, and a
//! depth-first search enumerates what is left. Rational attributes are
//! never sampled: once every finite attribute is fixed, Fourier–Motzkin
//! projection decides whether the remaining rationals are pinned to a
//! point or range over infinitely many values.

mod domain;
mod linear;
mod normalize;
mod propagate;
mod search;

pub use domain::{RatDomain, VarDomain};
pub use linear::{gaussian_eliminate, Bound, Contradiction, Elimination, LinearForm, Polyhedron, Range, Relation};
pub use normalize::{linearize, normalize, Atom, ConstraintNF};
pub use propagate::{first_fail, propagate, OPAQUE_FILTER_LIMIT};
pub use search::{solve_all, solve_predicate, solve_with_stats, BudgetLimit, SolveBudget, SolveOutcome, SolveStats};
