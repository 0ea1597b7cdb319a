//! Lexing, parsing and AST dumps.

pub mod ast;
pub mod dump;
pub mod lexer;
pub mod parser;
pub mod token;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use dump::{dump_ast, expr_source, pattern_source};
pub use lexer::lex;
pub use parser::{parse, parse_pattern, parse_with, IdSeed};
pub use token::Pos;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub pos: Pos,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(message: impl Into<String>, pos: Pos) -> Self {
        ParseError {
            message: message.into(),
            pos,
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Lex and parse a whole source file.
pub fn parse_source(source: &str) -> Result<ast::Program, ParseError> {
    parse(&lex(source)?)
}
