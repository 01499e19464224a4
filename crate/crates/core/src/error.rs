use thiserror::Error;

use crate::expr::{BindError, EvalError};
use crate::lang::SyntaxError;
use crate::model::ModelError;
use crate::solver::BudgetLimit;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bind(#[from] BindError),
    #[error("join cannot be grounded: attribute {0} appears on both sides")]
    JoinNotGroundable(String),
    #[error("{0} is not a query")]
    NotAQuery(String),
    #[error("extension is not listable: attribute {attribute} is not determined")]
    InfiniteExtension { attribute: String },
    #[error("solver budget exceeded: {0}")]
    BudgetExceeded(BudgetLimit),
    #[error("division by zero")]
    DivisionByZero,
    #[error("evaluation failed: {0}")]
    Eval(EvalError),
    #[error("relation {0} has an empty extension")]
    EmptyRelation(String),
    #[error("answer {attribute} = {value} leaves no alternatives")]
    InvalidAnswer { attribute: String, value: String },
    #[error("attribute {0} is already answered")]
    AlreadyAnswered(String),
    #[error("there is no answer to undo")]
    NothingToUndo,
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::DivisionByZero => Error::DivisionByZero,
            other => Error::Eval(other),
        }
    }
}

impl Error {
    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax(_) => "SyntaxError",
            Error::Model(m) => match m {
                ModelError::DuplicateName(_) => "DuplicateName",
                ModelError::UnknownReference(_) => "UnknownReference",
                ModelError::UnknownType(_) => "UnknownType",
                ModelError::TargetNotDataRelation(_) => "TargetNotDataRelation",
                ModelError::DomainViolation { .. } => "DomainViolation",
                ModelError::ArityMismatch { .. } => "ArityMismatch",
                ModelError::DuplicateAttribute(_) => "DuplicateAttribute",
                ModelError::UnknownAttribute(_) => "UnknownAttribute",
                ModelError::InvalidDomain(_) => "InvalidDomain",
                ModelError::InvalidValue { .. } => "InvalidValue",
            },
            Error::Bind(b) => match b {
                BindError::TypeError(_) => "TypeError",
                BindError::UnknownAttribute(_) => "UnknownAttribute",
                BindError::AmbiguousAttribute(_) => "AmbiguousAttribute",
            },
            Error::JoinNotGroundable(_) => "JoinNotGroundable",
            Error::NotAQuery(_) => "NotAQuery",
            Error::InfiniteExtension { .. } => "InfiniteExtension",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::DivisionByZero => "DivisionByZero",
            Error::Eval(_) => "EvaluationError",
            Error::EmptyRelation(_) => "EmptyRelation",
            Error::InvalidAnswer { .. } => "InvalidAnswer",
            Error::AlreadyAnswered(_) => "AlreadyAnswered",
            Error::NothingToUndo => "NothingToUndo",
        }
    }

    /// The attribute an error is about, when there is one.
    pub fn attribute(&self) -> Option<&str> {
        match self {
            Error::InfiniteExtension { attribute }
            | Error::InvalidAnswer { attribute, .. }
            | Error::AlreadyAnswered(attribute)
            | Error::JoinNotGroundable(attribute) => Some(attribute),
            Error::Model(ModelError::UnknownAttribute(a))
            | Error::Bind(BindError::UnknownAttribute(a))
            | Error::Bind(BindError::AmbiguousAttribute(a)) => Some(a),
            _ => None,
        }
    }
}
