//! Core of the dml language: values, parsing, name resolution, lowering to
//! loop IR, and the two execution paths (direct evaluation and IR execution).
//!
//! The crate is `no_std` with `alloc`; printing goes through the
//! [`runtime::Output`] trait so hosts decide where text ends up.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod frontend;
pub mod lower;
pub mod resolve;
pub mod runtime;
pub mod value;

pub use frontend::{parse_source, IdSeed, ParseError, Pos};
pub use resolve::{resolve, ResolveError, ResolvedProgram};
pub use runtime::{Interpreter, Output, Path, RuntimeError};
pub use value::{render, value_eq, Value};

use alloc::string::String;
use core::fmt;

/// Any error a source file can produce, with its position.
#[derive(Clone, Debug)]
pub enum Error {
    Parse(ParseError),
    Resolve(ResolveError),
    Plan(lower::PlanError),
    Runtime(RuntimeError),
}

impl Error {
    pub fn pos(&self) -> Pos {
        match self {
            Error::Parse(e) => e.pos,
            Error::Resolve(e) => e.pos,
            Error::Plan(e) => e.pos,
            Error::Runtime(e) => e.pos,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::Resolve(e) => e.kind.tag(),
            Error::Plan(_) => "PlanError",
            Error::Runtime(e) => e.kind.tag(),
        }
    }

    /// Static errors are detected before anything runs.
    pub fn is_static(&self) -> bool {
        !matches!(self, Error::Runtime(_))
    }

    pub fn message(&self) -> String {
        use alloc::string::ToString;
        match self {
            Error::Parse(e) => e.to_string(),
            Error::Resolve(e) => e.to_string(),
            Error::Plan(e) => e.to_string(),
            Error::Runtime(e) => e.message.clone(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error: {}: {}", self.pos(), self.tag(), self.message())
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

impl From<ResolveError> for Error {
    fn from(e: ResolveError) -> Self {
        Error::Resolve(e)
    }
}

impl From<lower::PlanError> for Error {
    fn from(e: lower::PlanError) -> Self {
        Error::Plan(e)
    }
}

impl From<RuntimeError> for Error {
    fn from(e: RuntimeError) -> Self {
        Error::Runtime(e)
    }
}

/// Parses, resolves and plans every construct of `source` without running it.
pub fn check(source: &str) -> Result<ResolvedProgram, Error> {
    let program = parse_source(source)?;
    let rp = resolve(program)?;
    lower::check_plans(&rp)?;
    Ok(rp)
}
