//! Read-eval-print loop over one persistent interpreter.

use std::io::{BufRead, Write};

use dml_core::frontend::{lex, parse_with, IdSeed};
use dml_core::lower::check_plans;
use dml_core::resolve::{resolve_in, GlobalScope, ResolvedProgram};
use dml_core::runtime::{Interpreter, Output};
use dml_core::{render, Error, Value};

use crate::{dump_all_ir, exit, Options};

const SOURCE_NAME: &str = "<stdin>";

pub struct Session<O: Output> {
    interp: Interpreter<O>,
    scope: GlobalScope,
    seed: IdSeed,
    opts: Options,
}

/// Whether `text` still needs more lines: open brackets, or a block that
/// has not been closed by an empty line.
fn incomplete(text: &str) -> bool {
    let mut depth: i64 = 0;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for ch in text.chars() {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == q || ch == '\n' {
                quote = None;
            }
            continue;
        }
        match ch {
            '\'' | '"' => quote = Some(ch),
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
    }
    if depth > 0 {
        return true;
    }
    let opens_block = text
        .lines()
        .next()
        .map(|l| l.split('#').next().unwrap_or("").trim_end().ends_with(':'))
        .unwrap_or(false);
    opens_block && !text.ends_with("\n\n")
}

impl<O: Output> Session<O> {
    pub fn new(opts: Options, out: O) -> Self {
        Session {
            interp: Interpreter::new(opts.config, out),
            scope: GlobalScope::default(),
            seed: IdSeed::default(),
            opts,
        }
    }

    pub fn interpreter(&self) -> &Interpreter<O> {
        &self.interp
    }

    fn compile(&mut self, text: &str, commit: bool) -> Result<ResolvedProgram, Error> {
        let tokens = lex(text)?;
        let program = parse_with(&tokens, &mut self.seed)?;
        let mut scope = self.scope.clone();
        let rp = resolve_in(program, &mut scope)?;
        check_plans(&rp)?;
        if commit {
            self.scope = scope;
        }
        Ok(rp)
    }

    /// Runs one complete input; returns text to show (value or diagnostic).
    pub fn eval_input(&mut self, text: &str) -> Result<Option<String>, String> {
        let diag = |e: Error| format!("{}:{}", SOURCE_NAME, e);
        let rp = self.compile(text, true).map_err(diag)?;
        match self.interp.run(&rp) {
            Ok(Some(Value::None)) | Ok(None) => Ok(None),
            Ok(Some(v)) => Ok(Some(render(&v))),
            Err(e) => Err(diag(Error::Runtime(e))),
        }
    }

    /// Handles a `:command`. Returns `None` on `:quit`.
    pub fn meta(&mut self, line: &str) -> Option<Result<String, String>> {
        let line = line.trim();
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        Some(match cmd {
            ":quit" | ":q" => return None,
            ":env" => {
                let mut text = String::new();
                for (name, v) in self.interp.globals() {
                    text.push_str(&format!("{} = {}\n", name, render(v)));
                }
                Ok(text)
            }
            ":ir" => match self.compile(&format!("{}\n", rest.trim()), false) {
                Ok(rp) if rp.ast.constructs().is_empty() => Err(String::from("no construct in expression")),
                Ok(rp) => Ok(dump_all_ir(&rp)),
                Err(e) => Err(format!("{}:{}", SOURCE_NAME, e)),
            },
            other => Err(format!("unknown command {} (try :env, :ir <expr>, :quit)", other)),
        })
    }

    pub fn options(&self) -> &Options {
        &self.opts
    }
}

/// Runs the loop until `:quit` or end of input. Prompts only when
/// `interactive`. Values and meta output go to `out`, diagnostics to `diag`.
pub fn run<R: BufRead, O: Output>(
    input: R,
    out: O,
    diag: &mut dyn Write,
    opts: Options,
    interactive: bool,
) -> (i32, O) {
    let mut session = Session::new(opts, out);
    let mut buffer = String::new();
    let mut lines = input.lines();
    loop {
        if interactive {
            let prompt = if buffer.is_empty() { ">>> " } else { "... " };
            session.interp.output_mut().print(prompt);
            let _ = std::io::stdout().flush();
        }
        let line = match lines.next() {
            Some(Ok(line)) => line,
            Some(Err(e)) => {
                let _ = writeln!(diag, "{}: error: {}", SOURCE_NAME, e);
                break;
            }
            None => {
                if !buffer.trim().is_empty() {
                    buffer.push('\n');
                    report(&mut session, diag, &buffer);
                }
                break;
            }
        };
        if buffer.is_empty() && line.trim_start().starts_with(':') {
            match session.meta(&line) {
                None => break,
                Some(Ok(text)) => session.interp.output_mut().print(&text),
                Some(Err(msg)) => {
                    let _ = writeln!(diag, "{}", msg);
                }
            }
            continue;
        }
        if buffer.is_empty() && line.trim().is_empty() {
            continue;
        }
        buffer.push_str(&line);
        buffer.push('\n');
        if incomplete(&buffer) {
            continue;
        }
        let text = std::mem::take(&mut buffer);
        report(&mut session, diag, &text);
    }
    (exit::OK, session.interp.into_output())
}

fn report<O: Output>(session: &mut Session<O>, diag: &mut dyn Write, text: &str) {
    match session.eval_input(text) {
        Ok(Some(shown)) => session.interp.output_mut().print(&format!("{}\n", shown)),
        Ok(None) => {}
        Err(msg) => {
            let _ = writeln!(diag, "{}", msg);
        }
    }
}
