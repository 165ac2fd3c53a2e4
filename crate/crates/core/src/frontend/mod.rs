//! Lexing, parsing and pretty-printing of imgql specifications.
//!
//! A specification is a sequence of `let`, `load`, `save`, `print` and
//! `import` commands. Commands need no terminator: each one starts with its
//! keyword and an expression ends at the first token that cannot extend it.

mod ast;
mod lexer;
mod parser;
mod printer;

pub use ast::{Command, CommandKind, Expr, ExprKind, Operator, Pos};
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::{parse, MAX_NESTING};
pub use printer::{print_command, print_expr, print_program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError { pos, message: message.into() }
    }
}

/// `tokenize` followed by `parse`.
pub fn parse_str(text: &str) -> Result<Vec<Command>, SyntaxError> {
    parse(&tokenize(text)?)
}
