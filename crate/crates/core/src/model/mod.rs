//! Types, values, headings, tuples, relation definitions and the catalog.

mod catalog;
mod domain;
mod heading;
mod scalar;

pub use catalog::{Catalog, CatalogEntry, RelationDef, RelationKind};
pub use domain::{Cardinality, DomainSpec, EnumType, DEFAULT_INT_BOUNDS};
pub use heading::{Attribute, Heading, Tuple};
pub use scalar::{format_rational, parse_rational, EnumValue, Scalar};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("name {0} is already defined")]
    DuplicateName(String),
    #[error("unknown relation or type {0}")]
    UnknownReference(String),
    #[error("unknown type {0}")]
    UnknownType(String),
    #[error("{0} is not a data relation; only data relations accept INSERT")]
    TargetNotDataRelation(String),
    #[error("tuple {tuple} does not conform to the heading of {relation}")]
    DomainViolation { relation: String, tuple: String },
    #[error("expected {expected} values, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("attribute {0} appears more than once")]
    DuplicateAttribute(String),
    #[error("unknown attribute {0}")]
    UnknownAttribute(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("{value} is not a value of {domain}")]
    InvalidValue { value: String, domain: String },
}
