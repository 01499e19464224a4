//! The SQL-like surface language: lexing, parsing and canonical rendering.
//!
//! The grammar is documented in `docs/grammar.ebnf` at the repository root.

pub mod ast;
mod lexer;
mod parser;
mod render;

pub use parser::{parse_expr, parse_script, parse_statement, Located};
pub use render::{ident, render_expr, render_query, render_statement, type_name};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}
