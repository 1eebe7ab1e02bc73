//! Expression language for symbols, used in run configs and on the command line.
//!
//! ```text
//! arc(0, 1.25) * (1 + z)
//! blaschke(0.5)^2 - conj(z)
//! trigpoly(-2, 1, 0, 3*i)  -- e^{-2iθ} + 3i
//! ```

mod ast;
mod lexer;
mod lower;
mod parser;

use std::fmt;

pub use ast::{Func, SymbolExpr};
pub use lower::{lower, LoweringOptions};
pub use parser::{parse, MAX_POWER};

use crate::error::Result;
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    Arity,
    InvalidArgument,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, line: usize, column: usize, message: String) -> Self {
        Self { kind, line, column, message }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// `parse` followed by `lower`.
pub fn symbol_from_str(text: &str, opts: &LoweringOptions) -> Result<Symbol> {
    lower(&parse(text)?, opts)
}
