//! Statements, expressions and construct dispatch.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::*;
use crate::frontend::ast::*;
use crate::resolve::Binding;
use crate::value::{arith, value_cmp, ArithOp, Func, Map, Set};

fn type_error(message: String, pos: Pos) -> RuntimeError {
    RuntimeError::new(RuntimeErrorKind::TypeMismatch, message, pos)
}

fn truth(v: &Value, what: &str, pos: Pos) -> RResult<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(type_error(
            format!("{} must be a bool, found {}", what, other.kind_name()),
            pos,
        )),
    }
}

impl<O: Output> Interpreter<O> {
    pub(crate) fn exec_block(&mut self, stmts: &[Stmt]) -> RResult<Flow> {
        for s in stmts {
            if let Flow::Return(v) = self.exec_stmt(s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    pub(crate) fn exec_stmt(&mut self, s: &Stmt) -> RResult<Flow> {
        match &s.kind {
            StmtKind::Assign(p, e) => {
                let v = self.eval(e)?;
                self.assign_pattern(p, v)?;
            }
            StmtKind::Expr(e) => {
                self.eval(e)?;
            }
            StmtKind::Def(def) => {
                let f = Value::Func(Func(def.clone()));
                self.assign_name(&def.name, f);
            }
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(e)?,
                    None => Value::None,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::If { branches, orelse } => {
                for (cond, body) in branches {
                    let v = self.eval(cond)?;
                    if truth(&v, "if condition", cond.pos)? {
                        return self.exec_block(body);
                    }
                }
                if let Some(body) = orelse {
                    return self.exec_block(body);
                }
            }
            StmtKind::While(cond, body) => loop {
                let v = self.eval(cond)?;
                if !truth(&v, "while condition", cond.pos)? {
                    break;
                }
                if let Flow::Return(v) = self.exec_block(body)? {
                    return Ok(Flow::Return(v));
                }
            },
            StmtKind::For(p, it, body) => {
                let src = self.eval(it)?;
                let elems = src.elements().map_err(|e| RuntimeError::from_value(e, it.pos))?;
                for i in 0..elems.len() {
                    self.assign_pattern(p, elems.get(i).clone())?;
                    if let Flow::Return(v) = self.exec_block(body)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
        }
        Ok(Flow::Normal)
    }

    /// Destructuring assignment for `=` and `for` targets.
    fn assign_pattern(&mut self, p: &Pattern, v: Value) -> RResult<()> {
        match p {
            Pattern::Name(n, _, _) => {
                self.assign_name(n, v);
                Ok(())
            }
            Pattern::Wild(_) => Ok(()),
            Pattern::Tuple(items, ppos) => {
                let parts = match &v {
                    Value::Tuple(xs) | Value::Seq(xs) if xs.len() == items.len() => xs.clone(),
                    other => {
                        return Err(type_error(
                            format!(
                                "cannot unpack {} into {} names",
                                crate::value::render(other),
                                items.len()
                            ),
                            *ppos,
                        ))
                    }
                };
                for (q, x) in items.iter().zip(parts.iter()) {
                    self.assign_pattern(q, x.clone())?;
                }
                Ok(())
            }
        }
    }

    pub(crate) fn lookup(&self, name: &Ident, id: NodeId, pos: Pos) -> RResult<Value> {
        match self.classes.get(&id).copied() {
            Some(VarClass::LogicVar(v)) | Some(VarClass::OuterRef(Binding::Logic(v))) => self.logic_value(v, pos),
            Some(VarClass::OuterRef(b)) => self.lookup_binding(name, b, pos),
            Some(VarClass::Builtin) => Err(type_error(format!("builtin '{}' can only be called", name), pos)),
            None => Err(RuntimeError::new(
                RuntimeErrorKind::UnboundVariable,
                format!("name '{}' was not resolved", name),
                pos,
            )),
        }
    }

    pub(crate) fn lookup_binding(&self, name: &Ident, b: Binding, pos: Pos) -> RResult<Value> {
        let found = match b {
            Binding::Logic(v) => return self.logic_value(v, pos),
            Binding::Local => self.frame().locals.as_ref().and_then(|l| l.get(name)),
            Binding::Global => self.globals.get(name),
        };
        found.cloned().ok_or_else(|| {
            RuntimeError::new(
                RuntimeErrorKind::UnboundVariable,
                format!("'{}' is used before it is assigned", name),
                pos,
            )
        })
    }

    pub(crate) fn eval(&mut self, e: &Expr) -> RResult<Value> {
        let pos = e.pos;
        let value_err = |err| RuntimeError::from_value(err, pos);
        match &e.kind {
            ExprKind::Int(n) => Ok(Value::Int(*n)),
            ExprKind::Str(s) => Ok(Value::Str(s.clone())),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Name(n, id) => self.lookup(n, *id, pos),
            ExprKind::Tuple(items) => Ok(Value::tuple(self.eval_all(items)?)),
            ExprKind::Seq(items) => Ok(Value::seq(self.eval_all(items)?)),
            ExprKind::Set(items) => {
                let vals = self.eval_all(items)?;
                Ok(Value::Set(Set::from_values(vals).map_err(value_err)?))
            }
            ExprKind::Map(entries) => {
                let mut pairs = Vec::with_capacity(entries.len());
                for (k, v) in entries {
                    let k = self.eval(k)?;
                    let v = self.eval(v)?;
                    pairs.push((k, v));
                }
                Ok(Value::Map(Map::from_entries(pairs).map_err(value_err)?))
            }
            ExprKind::Unary(UnOp::Not, x) => {
                let v = self.eval(x)?;
                Ok(Value::Bool(!truth(&v, "operand of 'not'", x.pos)?))
            }
            ExprKind::Unary(UnOp::Neg, x) => {
                let v = self.eval(x)?;
                let n = v.as_int().map_err(value_err)?;
                Ok(Value::Int(arith(ArithOp::Sub, 0, n).map_err(value_err)?))
            }
            ExprKind::Binary(op, l, r) => self.eval_binary(*op, l, r, pos),
            ExprKind::Call(callee, args) => {
                if let ExprKind::Name(name, id) = &callee.kind {
                    if self.classes.get(id) == Some(&VarClass::Builtin) {
                        let vals = self.eval_all(args)?;
                        return self.call_builtin(name, vals, pos);
                    }
                }
                let f = self.eval(callee)?;
                let vals = self.eval_all(args)?;
                match f {
                    Value::Func(f) => self.call_function(&f.0, vals, pos),
                    other => Err(type_error(format!("{} is not callable", other.kind_name()), callee.pos)),
                }
            }
            ExprKind::Method(recv, name, args) => {
                let v = self.eval(recv)?;
                let vals = self.eval_all(args)?;
                self.call_method(v, name, vals, pos)
            }
            ExprKind::Index(obj, key) => {
                let o = self.eval(obj)?;
                let k = self.eval(key)?;
                index(&o, &k, pos)
            }
            ExprKind::Construct(c) => self.eval_construct(c),
        }
    }

    fn eval_all(&mut self, items: &[Expr]) -> RResult<Vec<Value>> {
        items.iter().map(|x| self.eval(x)).collect()
    }

    fn eval_binary(&mut self, op: BinOp, l: &Expr, r: &Expr, pos: Pos) -> RResult<Value> {
        let value_err = |err| RuntimeError::from_value(err, pos);
        match op {
            BinOp::And | BinOp::Or | BinOp::Implies => {
                let a = self.eval(l)?;
                let a = truth(&a, &format!("left operand of '{}'", op.symbol()), l.pos)?;
                let short = match op {
                    BinOp::And => (!a).then_some(false),
                    BinOp::Or => a.then_some(true),
                    _ => (!a).then_some(true),
                };
                if let Some(v) = short {
                    return Ok(Value::Bool(v));
                }
                let b = self.eval(r)?;
                Ok(Value::Bool(truth(
                    &b,
                    &format!("right operand of '{}'", op.symbol()),
                    r.pos,
                )?))
            }
            _ => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                binary_value(op, &a, &b).map_err(value_err)
            }
        }
    }

    pub(crate) fn call_function(&mut self, f: &Arc<FuncDef>, args: Vec<Value>, pos: Pos) -> RResult<Value> {
        if args.len() != f.params.len() {
            return Err(RuntimeError::new(
                RuntimeErrorKind::ArityMismatch,
                format!("{}() takes {} arguments, got {}", f.name, f.params.len(), args.len()),
                pos,
            ));
        }
        if self.frames.len() > self.config.recursion_limit {
            return Err(RuntimeError::new(
                RuntimeErrorKind::RecursionLimit,
                format!("call depth exceeds {}", self.config.recursion_limit),
                pos,
            ));
        }
        let locals: BTreeMap<Ident, Value> = f.params.iter().map(|(p, _)| p.clone()).zip(args).collect();
        self.frames.push(Frame {
            locals: Some(locals),
            logic: BTreeMap::new(),
        });
        let result = self.exec_block(&f.body);
        self.frames.pop();
        match result? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => Ok(Value::None),
        }
    }

    fn call_method(&mut self, recv: Value, name: &str, args: Vec<Value>, pos: Pos) -> RResult<Value> {
        match (name, &recv) {
            ("keys", Value::Map(m)) => {
                if !args.is_empty() {
                    return Err(RuntimeError::new(
                        RuntimeErrorKind::ArityMismatch,
                        "keys() takes no arguments",
                        pos,
                    ));
                }
                Ok(Value::Set(m.keys()))
            }
            _ => Err(type_error(
                format!("{} has no method '{}'", recv.kind_name(), name),
                pos,
            )),
        }
    }

    /// Dispatches on the configured path; differential checking happens at
    /// the outermost construct only.
    pub(crate) fn eval_construct(&mut self, c: &Construct) -> RResult<Value> {
        let path = if self.construct_depth == 0 {
            self.config.path
        } else {
            self.sub_path
        };
        match path {
            Path::Differential => self.eval_differential(c),
            p => self.eval_on(c, p),
        }
    }

    fn eval_on(&mut self, c: &Construct, path: Path) -> RResult<Value> {
        let saved = self.sub_path;
        self.sub_path = path;
        self.construct_depth += 1;
        self.stats.constructs += 1;
        let before = (self.stats.direct_iterations, self.stats.ir_iterations);
        let result = match path {
            Path::Direct => self.eval_direct(c),
            _ => self.eval_lowered(c),
        };
        self.construct_depth -= 1;
        self.sub_path = saved;
        if self.config.trace {
            let visited = (self.stats.direct_iterations - before.0) + (self.stats.ir_iterations - before.1);
            let line = format!(
                "trace: {} {} [{}] -> {} ({} elements visited)\n",
                c.pos,
                c.op.keyword(),
                if path == Path::Direct { "direct" } else { "lowered" },
                describe_outcome(&result),
                visited
            );
            self.trace(&line);
        }
        result
    }

    fn eval_differential(&mut self, c: &Construct) -> RResult<Value> {
        let globals = self.globals.clone();
        let frame = self.frame().clone();

        self.captures.push(String::new());
        let direct = self.eval_on(c, Path::Direct);
        let direct_out = self.captures.pop().unwrap_or_default();
        let direct_globals = core::mem::replace(&mut self.globals, globals);
        let direct_frame = core::mem::replace(self.frame_mut(), frame);
        let direct_depth = self.frames.len();

        self.captures.push(String::new());
        let lowered = self.eval_on(c, Path::Lowered);
        let lowered_out = self.captures.pop().unwrap_or_default();

        let mut problems: Vec<&str> = Vec::new();
        if !same_outcome(&direct, &lowered) {
            problems.push("results");
        }
        if direct_out != lowered_out {
            problems.push("printed output");
        }
        let locals_agree = match (&direct_frame.locals, &self.frame().locals) {
            (Some(a), Some(b)) => same_bindings(a, b),
            (None, None) => true,
            _ => false,
        };
        if !same_bindings(&direct_globals, &self.globals) || !locals_agree || direct_depth != self.frames.len() {
            problems.push("variable bindings");
        }
        if !problems.is_empty() {
            return Err(RuntimeError::new(
                RuntimeErrorKind::DifferentialMismatch,
                format!(
                    "direct and lowered evaluation of {} differ in {}: direct {}, lowered {}",
                    c.op.keyword(),
                    problems.join(", "),
                    describe_outcome(&direct),
                    describe_outcome(&lowered)
                ),
                c.pos,
            ));
        }
        self.emit(&lowered_out);
        lowered
    }
}

/// Strict binary operators on evaluated operands.
pub(crate) fn binary_value(op: BinOp, a: &Value, b: &Value) -> Result<Value, crate::value::ValueError> {
    use crate::value::ValueError;
    let mismatch = || {
        ValueError::type_mismatch(format!(
            "unsupported operands for '{}': {} and {}",
            op.symbol(),
            a.kind_name(),
            b.kind_name()
        ))
    };
    let concat = |x: &Arc<[Value]>, y: &Arc<[Value]>| {
        let mut items: Vec<Value> = x.to_vec();
        items.extend(y.iter().cloned());
        items
    };
    Ok(match op {
        BinOp::Eq => Value::Bool(value_eq(a, b)),
        BinOp::Ne => Value::Bool(!value_eq(a, b)),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            if let (Value::Set(x), Value::Set(y)) = (a, b) {
                let r = match op {
                    BinOp::Le => x.is_subset(y),
                    BinOp::Lt => x.len() < y.len() && x.is_subset(y),
                    BinOp::Ge => y.is_subset(x),
                    _ => y.len() < x.len() && y.is_subset(x),
                };
                return Ok(Value::Bool(r));
            }
            let ord = value_cmp(a, b)?;
            Value::Bool(match op {
                BinOp::Lt => ord == Ordering::Less,
                BinOp::Le => ord != Ordering::Greater,
                BinOp::Gt => ord == Ordering::Greater,
                _ => ord != Ordering::Less,
            })
        }
        BinOp::In => Value::Bool(b.contains(a)?),
        BinOp::NotIn => Value::Bool(!b.contains(a)?),
        BinOp::BitOr => match (a, b) {
            (Value::Set(x), Value::Set(y)) => Value::Set(x.union(y)),
            _ => return Err(mismatch()),
        },
        BinOp::BitAnd => match (a, b) {
            (Value::Set(x), Value::Set(y)) => Value::Set(x.intersection(y)),
            _ => return Err(mismatch()),
        },
        BinOp::Add => match (a, b) {
            (Value::Int(x), Value::Int(y)) => Value::Int(arith(ArithOp::Add, *x, *y)?),
            (Value::Str(x), Value::Str(y)) => {
                let mut s = String::from(&**x);
                s.push_str(y);
                Value::str(&s)
            }
            (Value::Seq(x), Value::Seq(y)) => Value::seq(concat(x, y)),
            (Value::Tuple(x), Value::Tuple(y)) => Value::tuple(concat(x, y)),
            (Value::Set(x), Value::Set(y)) => Value::Set(x.union(y)),
            _ => return Err(mismatch()),
        },
        BinOp::Sub => match (a, b) {
            (Value::Int(x), Value::Int(y)) => Value::Int(arith(ArithOp::Sub, *x, *y)?),
            (Value::Set(x), Value::Set(y)) => Value::Set(x.difference(y)),
            _ => return Err(mismatch()),
        },
        BinOp::Mul | BinOp::FloorDiv | BinOp::Mod => {
            let aop = match op {
                BinOp::Mul => ArithOp::Mul,
                BinOp::FloorDiv => ArithOp::FloorDiv,
                _ => ArithOp::Mod,
            };
            match (a, b) {
                (Value::Int(x), Value::Int(y)) => Value::Int(arith(aop, *x, *y)?),
                _ => return Err(mismatch()),
            }
        }
        BinOp::And | BinOp::Or | BinOp::Implies => unreachable!("short-circuit operators are handled by the caller"),
    })
}

fn index(o: &Value, k: &Value, pos: Pos) -> RResult<Value> {
    let missing = |what: String| RuntimeError::new(RuntimeErrorKind::KeyMissing, what, pos);
    match o {
        Value::Map(m) => {
            if !k.is_hashable() {
                return Err(RuntimeError::new(
                    RuntimeErrorKind::Unhashable,
                    format!("{} cannot be a map key", k.kind_name()),
                    pos,
                ));
            }
            m.get(k)
                .cloned()
                .ok_or_else(|| missing(format!("key {} not in map", crate::value::render(k))))
        }
        Value::Seq(items) | Value::Tuple(items) => {
            let i = k.as_int().map_err(|e| RuntimeError::from_value(e, pos))?;
            let n = items.len() as i64;
            let j = if i < 0 { i + n } else { i };
            if j < 0 || j >= n {
                return Err(missing(format!("index {} out of range for length {}", i, n)));
            }
            Ok(items[j as usize].clone())
        }
        Value::Str(s) => {
            let i = k.as_int().map_err(|e| RuntimeError::from_value(e, pos))?;
            let chars: Vec<char> = s.chars().collect();
            let n = chars.len() as i64;
            let j = if i < 0 { i + n } else { i };
            if j < 0 || j >= n {
                return Err(missing(format!("index {} out of range for length {}", i, n)));
            }
            let mut out = String::new();
            out.push(chars[j as usize]);
            Ok(Value::str(&out))
        }
        other => Err(type_error(format!("{} cannot be indexed", other.kind_name()), pos)),
    }
}
