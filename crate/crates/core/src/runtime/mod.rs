//! Execution: environments, the direct evaluator, the IR executor and builtins.

pub mod builtins;
mod direct;
mod eval;
mod exec;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::frontend::ast::{ConstructId, Ident, NodeId, Pos};
use crate::lower::{LoopIr, PlanStrategy};
use crate::resolve::{ConstructInfo, ResolvedProgram, VarClass, VarId};
use crate::value::{value_eq, Value, ValueError, ValueErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuntimeErrorKind {
    EmptyAggregate,
    TypeMismatch,
    KeyMissing,
    Unhashable,
    Overflow,
    DivisionByZero,
    ArityMismatch,
    RecursionLimit,
    /// A local or global read before anything was assigned to it.
    UnboundVariable,
    /// The two execution paths disagreed.
    DifferentialMismatch,
}

impl RuntimeErrorKind {
    pub fn tag(self) -> &'static str {
        match self {
            RuntimeErrorKind::EmptyAggregate => "EmptyAggregate",
            RuntimeErrorKind::TypeMismatch => "TypeMismatch",
            RuntimeErrorKind::KeyMissing => "KeyMissing",
            RuntimeErrorKind::Unhashable => "Unhashable",
            RuntimeErrorKind::Overflow => "Overflow",
            RuntimeErrorKind::DivisionByZero => "DivisionByZero",
            RuntimeErrorKind::ArityMismatch => "ArityMismatch",
            RuntimeErrorKind::RecursionLimit => "RecursionLimit",
            RuntimeErrorKind::UnboundVariable => "UnboundVariable",
            RuntimeErrorKind::DifferentialMismatch => "DifferentialMismatch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    pub message: String,
    pub pos: Pos,
}

impl RuntimeError {
    pub fn new(kind: RuntimeErrorKind, message: impl Into<String>, pos: Pos) -> Self {
        RuntimeError {
            kind,
            message: message.into(),
            pos,
        }
    }

    pub(crate) fn from_value(e: ValueError, pos: Pos) -> Self {
        let kind = match e.kind {
            ValueErrorKind::TypeMismatch => RuntimeErrorKind::TypeMismatch,
            ValueErrorKind::Unhashable => RuntimeErrorKind::Unhashable,
            ValueErrorKind::Overflow => RuntimeErrorKind::Overflow,
            ValueErrorKind::DivisionByZero => RuntimeErrorKind::DivisionByZero,
        };
        RuntimeError::new(kind, e.message, pos)
    }
}

impl fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.tag(), self.message)
    }
}

pub type RResult<T> = Result<T, RuntimeError>;

/// Where `print` output and trace lines go.
pub trait Output {
    fn print(&mut self, text: &str);
    fn trace(&mut self, _text: &str) {}
}

/// Collects everything in memory.
#[derive(Clone, Debug, Default)]
pub struct BufferOutput {
    pub stdout: String,
    pub trace: String,
}

impl Output for BufferOutput {
    fn print(&mut self, text: &str) {
        self.stdout.push_str(text);
    }

    fn trace(&mut self, text: &str) {
        self.trace.push_str(text);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Path {
    /// Naive enumeration straight from the AST.
    Direct,
    /// Planned and lowered loop IR.
    #[default]
    Lowered,
    /// Both, compared on every outermost construct.
    Differential,
}

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub path: Path,
    pub plan: PlanStrategy,
    pub trace: bool,
    pub recursion_limit: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            path: Path::Lowered,
            plan: PlanStrategy::Greedy,
            trace: false,
            recursion_limit: 10_000,
        }
    }
}

/// Counters for tests and `--trace`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Elements visited by IR loops.
    pub ir_iterations: u64,
    /// Elements visited by the direct evaluator.
    pub direct_iterations: u64,
    pub constructs: u64,
}

#[derive(Clone, Debug, Default)]
struct Frame {
    /// `None` for the top level, whose variables are the globals.
    locals: Option<BTreeMap<Ident, Value>>,
    logic: BTreeMap<VarId, Value>,
}

/// Statement outcome.
pub(crate) enum Flow {
    Normal,
    Return(Value),
}

pub struct Interpreter<O: Output> {
    config: Config,
    globals: BTreeMap<Ident, Value>,
    frames: Vec<Frame>,
    classes: BTreeMap<NodeId, VarClass>,
    infos: BTreeMap<ConstructId, Arc<ConstructInfo>>,
    ir_cache: BTreeMap<ConstructId, Arc<LoopIr>>,
    output: O,
    captures: Vec<String>,
    construct_depth: usize,
    sub_path: Path,
    pub stats: Stats,
}

impl<O: Output> Interpreter<O> {
    pub fn new(config: Config, output: O) -> Self {
        Interpreter {
            config,
            globals: BTreeMap::new(),
            frames: alloc::vec![Frame::default()],
            classes: BTreeMap::new(),
            infos: BTreeMap::new(),
            ir_cache: BTreeMap::new(),
            output,
            captures: Vec::new(),
            construct_depth: 0,
            sub_path: config.path,
            stats: Stats::default(),
        }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn output(&self) -> &O {
        &self.output
    }

    pub fn output_mut(&mut self) -> &mut O {
        &mut self.output
    }

    pub fn into_output(self) -> O {
        self.output
    }

    pub fn global(&self, name: &str) -> Option<&Value> {
        self.globals.get(name)
    }

    /// Global bindings in name order.
    pub fn globals(&self) -> impl Iterator<Item = (&Ident, &Value)> {
        self.globals.iter()
    }

    /// Makes the name classes and constructs of `rp` known, without running it.
    pub fn load(&mut self, rp: &ResolvedProgram) {
        self.classes.extend(rp.classes.iter().map(|(k, v)| (*k, *v)));
        for (id, info) in &rp.constructs {
            self.infos.insert(*id, Arc::new(info.clone()));
        }
    }

    /// Runs every statement of `rp` at top level. Returns the value of the
    /// last statement when it is a bare expression.
    pub fn run(&mut self, rp: &ResolvedProgram) -> RResult<Option<Value>> {
        self.load(rp);
        // a failed REPL input may leave a deeper stack behind
        self.frames.truncate(1);
        self.construct_depth = 0;
        self.captures.clear();
        let mut last = None;
        for stmt in &rp.ast.stmts {
            last = None;
            if let crate::frontend::ast::StmtKind::Expr(e) = &stmt.kind {
                last = Some(self.eval(e)?);
            } else {
                self.exec_stmt(stmt)?;
            }
        }
        Ok(last)
    }

    fn emit(&mut self, text: &str) {
        match self.captures.last_mut() {
            Some(buf) => buf.push_str(text),
            None => self.output.print(text),
        }
    }

    fn trace(&mut self, text: &str) {
        if self.config.trace {
            self.output.trace(text);
        }
    }

    fn frame(&self) -> &Frame {
        self.frames.last().expect("top-level frame")
    }

    fn frame_mut(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("top-level frame")
    }

    /// Assigns in the innermost scope: function locals or globals.
    fn assign_name(&mut self, name: &Ident, v: Value) {
        let frame = self.frames.last_mut().expect("top-level frame");
        match &mut frame.locals {
            Some(locals) => {
                locals.insert(name.clone(), v);
            }
            None => {
                self.globals.insert(name.clone(), v);
            }
        }
    }

    fn logic_value(&self, var: VarId, pos: Pos) -> RResult<Value> {
        self.frame().logic.get(&var).cloned().ok_or_else(|| {
            let name = self
                .infos
                .get(&var.construct)
                .map(|c| String::from(&**c.var_name(var)))
                .unwrap_or_default();
            RuntimeError::new(
                RuntimeErrorKind::UnboundVariable,
                format!("logic variable '{}' has no value here", name),
                pos,
            )
        })
    }

    fn info(&self, id: ConstructId) -> Arc<ConstructInfo> {
        self.infos
            .get(&id)
            .cloned()
            .expect("construct was resolved before execution")
    }

    /// Removes a construct's logic variables from the current frame.
    fn clear_logic(&mut self, info: &ConstructInfo) {
        let frame = self.frame_mut();
        for v in &info.vars {
            frame.logic.remove(&v.id);
        }
    }

    fn write_witnesses(&mut self, info: &ConstructInfo, pos: Pos) -> RResult<()> {
        for &w in &info.witnesses {
            let v = self.logic_value(w, pos)?;
            let name = info.var_name(w).clone();
            self.assign_name(&name, v);
        }
        Ok(())
    }
}

/// Compares the observable state left by two paths.
fn same_bindings(a: &BTreeMap<Ident, Value>, b: &BTreeMap<Ident, Value>) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|((ka, va), (kb, vb))| ka == kb && value_eq(va, vb))
}

fn same_outcome(a: &RResult<Value>, b: &RResult<Value>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => value_eq(x, y),
        (Err(x), Err(y)) => x.kind == y.kind,
        _ => false,
    }
}

fn describe_outcome(r: &RResult<Value>) -> String {
    match r {
        Ok(v) => crate::value::render(v),
        Err(e) => format!("{}", e),
    }
}

#[cfg(test)]
mod tests;
