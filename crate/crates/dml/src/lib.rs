//! Host side of dml: running files, static checks, dumps and the REPL.

pub mod repl;

use std::fmt::Write as _;
use std::io::Write;

use dml_core::frontend::dump_ast;
use dml_core::lower::{dump_ir, lower, plan_clauses, PlanStrategy};
use dml_core::resolve::ResolvedProgram;
use dml_core::runtime::{Config, Interpreter, Output};
use dml_core::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const STATIC: i32 = 2;
    pub const USAGE: i32 = 64;
}

/// Stack for the interpreter thread; deep dml recursion needs far more than
/// the default main-thread stack.
pub const STACK_SIZE: usize = 1 << 30;

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub config: Config,
    pub dump_ast: bool,
    pub dump_ir: bool,
}

/// Writes `print` output to stdout and trace lines to stderr.
#[derive(Default)]
pub struct StdOutput;

impl Output for StdOutput {
    fn print(&mut self, text: &str) {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(text.as_bytes());
    }

    fn trace(&mut self, text: &str) {
        let _ = std::io::stderr().lock().write_all(text.as_bytes());
    }
}

/// Everything a run produced besides printed output.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    /// `file:line:col: error: Tag: message`, when the run failed.
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok() -> Self {
        Outcome {
            code: exit::OK,
            diagnostic: None,
        }
    }

    fn failed(file: &str, err: &Error) -> Self {
        Outcome {
            code: if err.is_static() { exit::STATIC } else { exit::RUNTIME },
            diagnostic: Some(format!("{}:{}", file, err)),
        }
    }
}

/// IR dump of every construct, in source order, with the static greedy plan.
pub fn dump_all_ir(rp: &ResolvedProgram) -> String {
    let mut text = String::new();
    for c in rp.ast.constructs() {
        let info = rp.construct(c.id);
        match plan_clauses(c, info, PlanStrategy::Greedy, &[]) {
            Ok(plan) => text.push_str(&dump_ir(&lower(c, &plan, info, &rp.classes))),
            Err(e) => {
                let _ = writeln!(text, "{} #{} at {}: {}", c.op.keyword(), c.id.0, c.pos, e);
            }
        }
    }
    text
}

/// Parses, resolves and plans. Prints the requested dumps through `out`.
pub fn check_source<O: Output>(
    file: &str,
    source: &str,
    opts: &Options,
    out: &mut O,
) -> Result<ResolvedProgram, Outcome> {
    let rp = dml_core::check(source).map_err(|e| Outcome::failed(file, &e))?;
    if opts.dump_ast {
        out.print(&dump_ast(&rp.ast));
    }
    if opts.dump_ir {
        out.print(&dump_all_ir(&rp));
    }
    Ok(rp)
}

/// Checks and runs a whole program, returning the output sink for inspection.
pub fn run_source<O: Output>(file: &str, source: &str, opts: &Options, mut out: O) -> (Outcome, O) {
    let rp = match check_source(file, source, opts, &mut out) {
        Ok(rp) => rp,
        Err(outcome) => return (outcome, out),
    };
    let mut interp = Interpreter::new(opts.config, out);
    let outcome = match interp.run(&rp) {
        Ok(_) => Outcome::ok(),
        Err(e) => Outcome::failed(file, &Error::Runtime(e)),
    };
    (outcome, interp.into_output())
}

/// Static check only.
pub fn check_only<O: Output>(file: &str, source: &str, opts: &Options, mut out: O) -> (Outcome, O) {
    let outcome = match check_source(file, source, opts, &mut out) {
        Ok(_) => Outcome::ok(),
        Err(outcome) => outcome,
    };
    (outcome, out)
}

/// Runs `f` on a thread with [`STACK_SIZE`] bytes of stack.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(f)
        .expect("spawning interpreter thread")
        .join()
        .unwrap_or_else(|panic| std::panic::resume_unwind(panic))
}
