//! Name classification for declarative constructs.
//!
//! Inside a quantification, comprehension or aggregation, a name in a
//! membership pattern is a fresh logic variable of that construct unless it
//! is already bound at that point (by an enclosing construct, a parameter, or
//! an earlier assignment). In that case the pattern position is an equality
//! constraint against the outer value. Every logic variable is therefore
//! range-restricted by construction; a name that is neither a logic variable
//! nor bound anywhere is reported as an unrestricted logic variable.
//!
//! Names bound only as `some` witnesses are visible to later code but do not
//! turn later pattern occurrences into constraints.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::frontend::ast::*;
use crate::runtime::builtins::is_builtin;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub construct: ConstructId,
    pub index: u32,
}

/// Where an outer reference is looked up at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binding {
    /// A logic variable of an enclosing construct.
    Logic(VarId),
    Local,
    Global,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarClass {
    LogicVar(VarId),
    OuterRef(Binding),
    Builtin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolveErrorKind {
    UnrestrictedLogicVar,
    UnboundName,
    DuplicateParam,
}

impl ResolveErrorKind {
    pub fn tag(self) -> &'static str {
        match self {
            ResolveErrorKind::UnrestrictedLogicVar => "UnrestrictedLogicVar",
            ResolveErrorKind::UnboundName => "UnboundName",
            ResolveErrorKind::DuplicateParam => "DuplicateParam",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolveError {
    pub kind: ResolveErrorKind,
    pub name: Ident,
    pub pos: Pos,
    in_function: bool,
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ResolveErrorKind::UnrestrictedLogicVar => write!(
                f,
                "'{}' is not bound by any membership clause and not defined outside",
                self.name
            ),
            ResolveErrorKind::UnboundName => write!(f, "name '{}' is not defined", self.name),
            ResolveErrorKind::DuplicateParam => write!(f, "duplicate parameter '{}'", self.name),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LogicVar {
    pub name: Ident,
    pub id: VarId,
    /// Index of the first membership clause whose pattern binds the variable.
    pub restricted_by: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ClauseInfo {
    /// This construct's logic variables used by the clause's source
    /// (membership) or expression (condition).
    pub deps: BTreeSet<VarId>,
    /// This construct's logic variables occurring in the pattern, in order.
    pub binds: Vec<VarId>,
}

#[derive(Clone, Debug)]
pub struct ConstructInfo {
    pub id: ConstructId,
    pub op: ConstructOp,
    pub pos: Pos,
    /// Sorted by name; `vars[i].id.index == i`.
    pub vars: Vec<LogicVar>,
    pub witnesses: Vec<VarId>,
    pub clauses: Vec<ClauseInfo>,
    pub body_deps: BTreeSet<VarId>,
}

impl ConstructInfo {
    pub fn var(&self, id: VarId) -> &LogicVar {
        &self.vars[id.index as usize]
    }

    pub fn var_name(&self, id: VarId) -> &Ident {
        &self.var(id).name
    }
}

/// The parsed program plus name classes and per-construct variable tables.
#[derive(Clone, Debug)]
pub struct ResolvedProgram {
    pub ast: Program,
    pub classes: BTreeMap<NodeId, VarClass>,
    pub constructs: BTreeMap<ConstructId, ConstructInfo>,
}

impl ResolvedProgram {
    pub fn class(&self, id: NodeId) -> Option<VarClass> {
        self.classes.get(&id).copied()
    }

    pub fn construct(&self, id: ConstructId) -> &ConstructInfo {
        &self.constructs[&id]
    }

    /// Restriction proof for a logic variable: the clause that binds it.
    pub fn restriction_proof(&self, var: VarId) -> Option<usize> {
        self.constructs
            .get(&var.construct)
            .and_then(|c| c.vars.get(var.index as usize))
            .map(|v| v.restricted_by)
    }
}

/// Ordered witness variables of a quantification; empty for `each`.
pub fn witness_vars(q: ConstructId, rp: &ResolvedProgram) -> Vec<VarId> {
    rp.constructs.get(&q).map(|c| c.witnesses.clone()).unwrap_or_default()
}

/// Top-level names carried across inputs of one session.
#[derive(Clone, Debug, Default)]
pub struct GlobalScope {
    /// Names bound by assignment, `for` or `def` so far.
    pub bound: BTreeSet<Ident>,
    /// Every name that may hold a global value, including `some` witnesses.
    pub known: BTreeSet<Ident>,
}

pub fn resolve(program: Program) -> Result<ResolvedProgram, ResolveError> {
    resolve_in(program, &mut GlobalScope::default())
}

/// Resolves `program` against (and then extends) an existing global scope.
pub fn resolve_in(program: Program, globals: &mut GlobalScope) -> Result<ResolvedProgram, ResolveError> {
    let mut scratch = globals.clone();
    let mut r = Resolver::new(&mut scratch);
    r.run(&program);
    if let Some(err) = r.errors.into_iter().next() {
        return Err(err);
    }
    let (classes, constructs) = (r.classes, r.infos);
    *globals = scratch;
    Ok(ResolvedProgram {
        ast: program,
        classes,
        constructs,
    })
}

/// Checks only function bodies: duplicate parameters and names that resolve
/// to neither parameters, locals, globals nor builtins.
pub fn check_function_scopes(program: &Program) -> Result<(), ResolveError> {
    let mut globals = GlobalScope::default();
    let mut r = Resolver::new(&mut globals);
    r.run(program);
    match r.errors.into_iter().find(|e| e.in_function) {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

/// Frame depth and variable of an enclosing construct.
type FrameRef = (usize, VarId);

struct FuncScope {
    known: BTreeSet<Ident>,
    bound: BTreeSet<Ident>,
    globals_bound: BTreeSet<Ident>,
}

struct Frame {
    id: ConstructId,
    vars: BTreeMap<Ident, VarId>,
    referenced: BTreeSet<VarId>,
}

struct Resolver<'g> {
    globals: &'g mut GlobalScope,
    func: Option<FuncScope>,
    frames: Vec<Frame>,
    classes: BTreeMap<NodeId, VarClass>,
    infos: BTreeMap<ConstructId, ConstructInfo>,
    errors: Vec<ResolveError>,
}

/// Names a statement list may bind in its own scope (not inside nested defs).
fn collect_bindings(stmts: &[Stmt], out: &mut BTreeSet<Ident>) {
    for s in stmts {
        match &s.kind {
            StmtKind::Assign(p, _) => out.extend(p.names().into_iter().map(|(n, _)| n.clone())),
            StmtKind::For(p, _, body) => {
                out.extend(p.names().into_iter().map(|(n, _)| n.clone()));
                collect_bindings(body, out);
            }
            StmtKind::Def(def) => {
                out.insert(def.name.clone());
            }
            StmtKind::If { branches, orelse } => {
                for (_, body) in branches {
                    collect_bindings(body, out);
                }
                if let Some(body) = orelse {
                    collect_bindings(body, out);
                }
            }
            StmtKind::While(_, body) => collect_bindings(body, out),
            StmtKind::Return(_) | StmtKind::Expr(_) => {}
        }
        collect_witness_candidates(s, out);
    }
}

/// Pattern names of every `some` in the statement, excluding nested defs.
fn collect_witness_candidates(s: &Stmt, out: &mut BTreeSet<Ident>) {
    let mut visit = |e: &Expr| {
        e.for_each_construct(&mut |c| {
            if c.op == ConstructOp::Some {
                for clause in &c.clauses {
                    if let Clause::Member { pattern, .. } = clause {
                        out.extend(pattern.names().into_iter().map(|(n, _)| n.clone()));
                    }
                }
            }
        })
    };
    match &s.kind {
        StmtKind::Def(_) => {}
        StmtKind::Assign(_, e) | StmtKind::Expr(e) => visit(e),
        StmtKind::Return(e) => {
            if let Some(e) = e {
                visit(e)
            }
        }
        StmtKind::If { branches, .. } => {
            // bodies are handled by collect_bindings' recursion
            for (c, _) in branches {
                visit(c);
            }
        }
        StmtKind::While(c, _) => visit(c),
        StmtKind::For(_, it, _) => visit(it),
    }
}

impl<'g> Resolver<'g> {
    fn new(globals: &'g mut GlobalScope) -> Self {
        Resolver {
            globals,
            func: None,
            frames: Vec::new(),
            classes: BTreeMap::new(),
            infos: BTreeMap::new(),
            errors: Vec::new(),
        }
    }

    fn run(&mut self, program: &Program) {
        let mut top = BTreeSet::new();
        collect_bindings(&program.stmts, &mut top);
        self.globals.known.extend(top);
        self.block(&program.stmts);
    }

    fn error(&mut self, kind: ResolveErrorKind, name: &Ident, pos: Pos) {
        let in_function = self.func.is_some();
        self.errors.push(ResolveError {
            kind,
            name: name.clone(),
            pos,
            in_function,
        });
    }

    fn bind(&mut self, name: &Ident) {
        match &mut self.func {
            Some(f) => {
                f.bound.insert(name.clone());
                f.known.insert(name.clone());
            }
            None => {
                self.globals.bound.insert(name.clone());
                self.globals.known.insert(name.clone());
            }
        }
    }

    fn bind_pattern(&mut self, p: &Pattern) {
        for (n, _) in p.names() {
            self.bind(n);
        }
    }

    fn block(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Assign(p, e) => {
                self.expr(e);
                self.bind_pattern(p);
            }
            StmtKind::Expr(e) => self.expr(e),
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            StmtKind::Def(def) => {
                self.bind(&def.name);
                self.function(def);
            }
            StmtKind::If { branches, orelse } => {
                for (cond, body) in branches {
                    self.expr(cond);
                    self.block(body);
                }
                if let Some(body) = orelse {
                    self.block(body);
                }
            }
            StmtKind::While(cond, body) => {
                self.expr(cond);
                self.block(body);
            }
            StmtKind::For(p, it, body) => {
                self.expr(it);
                self.bind_pattern(p);
                self.block(body);
            }
        }
    }

    fn function(&mut self, def: &FuncDef) {
        let mut params = BTreeSet::new();
        for (name, pos) in &def.params {
            if !params.insert(name.clone()) {
                let saved = self.func.take();
                self.func = Some(FuncScope {
                    known: BTreeSet::new(),
                    bound: BTreeSet::new(),
                    globals_bound: BTreeSet::new(),
                });
                self.error(ResolveErrorKind::DuplicateParam, name, *pos);
                self.func = saved;
            }
        }
        let mut known = params.clone();
        collect_bindings(&def.body, &mut known);
        let scope = FuncScope {
            known,
            bound: params,
            globals_bound: self.globals.bound.clone(),
        };
        let saved_func = self.func.replace(scope);
        let saved_frames = core::mem::take(&mut self.frames);
        self.block(&def.body);
        self.frames = saved_frames;
        self.func = saved_func;
    }

    /// Is `name` bound outside the constructs at this point?
    fn outer_bound(&self, name: &Ident) -> Option<Binding> {
        match &self.func {
            Some(f) if f.bound.contains(name) => Some(Binding::Local),
            Some(f) if f.globals_bound.contains(name) => Some(Binding::Global),
            Some(_) => None,
            None if self.globals.bound.contains(name) => Some(Binding::Global),
            None => None,
        }
    }

    fn frame_var(&self, name: &Ident) -> Option<(usize, VarId)> {
        self.frames
            .iter()
            .enumerate()
            .rev()
            .find_map(|(depth, f)| f.vars.get(name).map(|v| (depth, *v)))
    }

    fn name(&mut self, name: &Ident, id: NodeId, pos: Pos) {
        if let Some((depth, var)) = self.frame_var(name) {
            self.frames[depth].referenced.insert(var);
            let class = if depth + 1 == self.frames.len() {
                VarClass::LogicVar(var)
            } else {
                VarClass::OuterRef(Binding::Logic(var))
            };
            self.classes.insert(id, class);
            return;
        }
        let class = match &self.func {
            Some(f) if f.known.contains(name) => Some(VarClass::OuterRef(Binding::Local)),
            _ if self.globals.known.contains(name) => Some(VarClass::OuterRef(Binding::Global)),
            _ if is_builtin(name) => Some(VarClass::Builtin),
            _ => None,
        };
        match class {
            Some(c) => {
                self.classes.insert(id, c);
            }
            None if !self.frames.is_empty() => self.error(ResolveErrorKind::UnrestrictedLogicVar, name, pos),
            None => self.error(ResolveErrorKind::UnboundName, name, pos),
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Int(_) | ExprKind::Str(_) | ExprKind::Bool(_) => {}
            ExprKind::Name(n, id) => self.name(n, *id, e.pos),
            ExprKind::Tuple(items) | ExprKind::Set(items) | ExprKind::Seq(items) => {
                items.iter().for_each(|x| self.expr(x))
            }
            ExprKind::Map(entries) => {
                for (k, v) in entries {
                    self.expr(k);
                    self.expr(v);
                }
            }
            ExprKind::Unary(_, x) => self.expr(x),
            ExprKind::Binary(_, l, r) | ExprKind::Index(l, r) => {
                self.expr(l);
                self.expr(r);
            }
            ExprKind::Call(f, args) => {
                self.expr(f);
                args.iter().for_each(|x| self.expr(x));
            }
            ExprKind::Method(recv, _, args) => {
                self.expr(recv);
                args.iter().for_each(|x| self.expr(x));
            }
            ExprKind::Construct(c) => self.construct(c),
        }
    }

    fn construct(&mut self, c: &Construct) {
        // classify pattern names first: constraint or fresh logic variable
        let mut fresh: BTreeSet<Ident> = BTreeSet::new();
        // (occurrence, class, enclosing frame it refers to)
        let mut constraints: Vec<(NodeId, VarClass, Option<FrameRef>)> = Vec::new();
        for clause in &c.clauses {
            if let Clause::Member { pattern, .. } = clause {
                for (name, id) in pattern.names() {
                    if let Some((depth, var)) = self.frame_var(name) {
                        constraints.push((id, VarClass::OuterRef(Binding::Logic(var)), Some((depth, var))));
                    } else if let Some(b) = self.outer_bound(name) {
                        constraints.push((id, VarClass::OuterRef(b), None));
                    } else {
                        fresh.insert(name.clone());
                    }
                }
            }
        }
        for (id, class, frame_ref) in constraints {
            self.classes.insert(id, class);
            if let Some((depth, var)) = frame_ref {
                self.frames[depth].referenced.insert(var);
            }
        }
        let vars: BTreeMap<Ident, VarId> = fresh
            .iter()
            .enumerate()
            .map(|(i, n)| {
                (
                    n.clone(),
                    VarId {
                        construct: c.id,
                        index: i as u32,
                    },
                )
            })
            .collect();

        let mut clause_infos = Vec::with_capacity(c.clauses.len());
        let mut witnesses: Vec<VarId> = Vec::new();
        for clause in &c.clauses {
            let mut info = ClauseInfo::default();
            if let Clause::Member { pattern, .. } = clause {
                for (name, id) in pattern.names() {
                    if let Some(&var) = vars.get(name) {
                        self.classes.insert(id, VarClass::LogicVar(var));
                        if !info.binds.contains(&var) {
                            info.binds.push(var);
                        }
                        if !witnesses.contains(&var) {
                            witnesses.push(var);
                        }
                    }
                }
            }
            clause_infos.push(info);
        }

        self.frames.push(Frame {
            id: c.id,
            vars: vars.clone(),
            referenced: BTreeSet::new(),
        });
        for (i, clause) in c.clauses.iter().enumerate() {
            let e = match clause {
                Clause::Member { source, .. } => source,
                Clause::Cond(e) => e,
            };
            self.expr(e);
            let top = self.frames.last_mut().expect("frame pushed above");
            clause_infos[i].deps = core::mem::take(&mut top.referenced);
        }
        self.expr(&c.body);
        let frame = self.frames.pop().expect("frame pushed above");
        debug_assert_eq!(frame.id, c.id);
        let body_deps = frame.referenced;

        let logic_vars: Vec<LogicVar> = vars
            .iter()
            .map(|(name, &id)| LogicVar {
                name: name.clone(),
                id,
                restricted_by: clause_infos
                    .iter()
                    .position(|ci| ci.binds.contains(&id))
                    .unwrap_or(usize::MAX),
            })
            .collect();
        let mut sorted = logic_vars;
        sorted.sort_by_key(|v| v.id.index);

        if c.op != ConstructOp::Some {
            witnesses.clear();
        }
        self.infos.insert(
            c.id,
            ConstructInfo {
                id: c.id,
                op: c.op,
                pos: c.pos,
                vars: sorted,
                witnesses,
                clauses: clause_infos,
                body_deps,
            },
        );
    }
}

/// Human-readable summary used by debugging output.
pub fn describe_class(class: VarClass) -> String {
    match class {
        VarClass::LogicVar(v) => format!("logic #{}.{}", v.construct.0, v.index),
        VarClass::OuterRef(Binding::Logic(v)) => format!("outer logic #{}.{}", v.construct.0, v.index),
        VarClass::OuterRef(Binding::Local) => String::from("local"),
        VarClass::OuterRef(Binding::Global) => String::from("global"),
        VarClass::Builtin => String::from("builtin"),
    }
}
