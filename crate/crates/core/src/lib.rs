//! An in-memory relational engine in which complete relations restricted
//! by a predicate live next to ordinary data relations.
//!
//! A complete relation over attributes `a1 … aN` contains every tuple of
//! `Dom(a1) × … × Dom(aN)`; restricting it with a predicate `P` gives a
//! constant relation whose extension the solver computes on demand. The
//! same relation therefore answers queries in any direction: grounding
//! any attribute with a WHERE clause lets the others be derived.
//!
//! ```
//! use sigmadb::{exec, Catalog, SolveBudget};
//!
//! let budget = SolveBudget::default();
//! let catalog = Catalog::new();
//! let (catalog, _) = exec::run_statement(
//!     &catalog,
//!     "CREATE VIEW gst AS SELECT * FROM COMPLETE(Price float, Ex float, Tax float) \
//!      WHERE Tax = Price / 11 AND Ex = Price - Tax;",
//!     &budget,
//! )
//! .unwrap();
//! let catalog = catalog.unwrap();
//! let rows = exec::query(&catalog, "SELECT * FROM gst WHERE Tax = 10;", &budget).unwrap();
//! assert_eq!(rows.tuples.len(), 1);
//! ```

pub mod error;
pub mod exec;
pub mod expr;
pub mod lang;
pub mod model;
pub mod plan;
pub mod qa;
pub mod solver;

pub use error::{Error, Result};
pub use exec::{execute, RelationResult, ResultStatus, StatementOutcome};
pub use expr::PredicateExpr;
pub use model::{Catalog, DomainSpec, Heading, RelationDef, Scalar, Tuple};
pub use plan::LogicalPlan;
pub use solver::{SolveBudget, SolveOutcome};
