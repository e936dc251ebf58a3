//! Concrete syntax: lexer, recursive-descent parser, AST, pretty-printer.
//!
//! A program is `begin <declarations> in <statements> end`. Declarations
//! bind unit variables (`x : float of m * s^-1 named V`) or functions
//! (`fun f (a : J named E) : J named E is a + a`). Statements are
//! assignments and `if <cmp> then ... else ... end` conditionals. `--`
//! starts a comment. Source files use extension `.uq`.

pub mod ast;
mod lexer;
mod parser;
pub mod pretty;

pub use ast::*;
pub use parser::{parse, ParseError, ParseErrorKind};
pub use pretty::pretty;
