//! Reader and printer for the Prolog subset used by knowledge-base and
//! schema files: quoted and unquoted atoms, integers, floats, variables,
//! structures in functional notation, proper and partial lists, and
//! `.`-terminated fact clauses with `%` line comments.

mod lexer;
mod parser;
mod printer;

use std::fmt;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_clauses, parse_program, parse_term};
pub use printer::{format_float, is_plain_atom, print_canonical, quote_atom};

/// 1-based line and column (columns count characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{pos}: {message} (found `{found}`)")]
pub struct ParseError {
    pub message: String,
    pub pos: Position,
    pub found: String,
}

impl ParseError {
    pub(crate) fn new(message: impl Into<String>, pos: Position, found: impl Into<String>) -> Self {
        ParseError {
            message: message.into(),
            pos,
            found: found.into(),
        }
    }
}
