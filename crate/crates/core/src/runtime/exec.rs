//! Execution of lowered loop IR.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::*;
use crate::frontend::ast::{Clause, Construct, Pos};
use crate::lower::{lower, plan_clauses, AccKind, Ir, IrPat, LoopIr, Plan};
use crate::value::{arith, value_cmp, ArithOp, Set};

/// Running accumulator of a construct.
pub(crate) enum Acc {
    Set(Set),
    List(Vec<Value>),
    Sum(i64),
    Prod(i64),
    Count(i64),
    Max(Option<Value>),
    Min(Option<Value>),
    All,
    Any,
}

impl Acc {
    pub(crate) fn new(kind: AccKind) -> Acc {
        match kind {
            AccKind::Set => Acc::Set(Set::new()),
            AccKind::List => Acc::List(Vec::new()),
            AccKind::Sum => Acc::Sum(0),
            AccKind::Prod => Acc::Prod(1),
            AccKind::Count => Acc::Count(0),
            AccKind::Max => Acc::Max(None),
            AccKind::Min => Acc::Min(None),
            AccKind::All => Acc::All,
            AccKind::Any => Acc::Any,
        }
    }

    pub(crate) fn update(&mut self, v: Value, pos: Pos) -> RResult<()> {
        let value_err = |e| RuntimeError::from_value(e, pos);
        match self {
            Acc::Set(s) => {
                s.insert(v).map_err(value_err)?;
            }
            Acc::List(items) => items.push(v),
            Acc::Sum(total) => {
                *total = arith(ArithOp::Add, *total, v.as_int().map_err(value_err)?).map_err(value_err)?
            }
            Acc::Prod(total) => {
                *total = arith(ArithOp::Mul, *total, v.as_int().map_err(value_err)?).map_err(value_err)?
            }
            Acc::Count(n) => *n += 1,
            Acc::Max(best) => keep(best, v, Ordering::Greater, pos)?,
            Acc::Min(best) => keep(best, v, Ordering::Less, pos)?,
            Acc::All | Acc::Any => {}
        }
        Ok(())
    }

    pub(crate) fn finish(self, op_name: &str, pos: Pos) -> RResult<Value> {
        Ok(match self {
            Acc::Set(s) => Value::Set(s),
            Acc::List(items) => Value::seq(items),
            Acc::Sum(n) | Acc::Prod(n) | Acc::Count(n) => Value::Int(n),
            Acc::Max(best) | Acc::Min(best) => best.ok_or_else(|| {
                RuntimeError::new(
                    RuntimeErrorKind::EmptyAggregate,
                    format!("{} over no elements", op_name),
                    pos,
                )
            })?,
            Acc::All => Value::Bool(true),
            Acc::Any => Value::Bool(false),
        })
    }
}

/// Replaces `best` when `v` compares `want` to it; ties keep the earlier value.
fn keep(best: &mut Option<Value>, v: Value, want: Ordering, pos: Pos) -> RResult<()> {
    let replace = match best {
        None => true,
        Some(b) => value_cmp(&v, b).map_err(|e| RuntimeError::from_value(e, pos))? == want,
    };
    if replace {
        *best = Some(v);
    }
    Ok(())
}

fn collection_check(src: &Value, pos: Pos) -> RResult<()> {
    match src {
        Value::Set(_) | Value::Seq(_) | Value::Tuple(_) | Value::Map(_) => Ok(()),
        other => Err(RuntimeError::new(
            RuntimeErrorKind::TypeMismatch,
            format!("membership source must be a collection, found {}", other.kind_name()),
            pos,
        )),
    }
}

impl<O: Output> Interpreter<O> {
    /// Plans the construct with the configured strategy. Sized planning
    /// evaluates the sources that do not depend on the construct's own
    /// variables to learn their sizes.
    pub(crate) fn plan_for(&mut self, c: &Construct, info: &ConstructInfo) -> RResult<Plan> {
        let sizes = match self.config.plan {
            PlanStrategy::Greedy => Vec::new(),
            PlanStrategy::Sized => {
                let mut sizes = Vec::with_capacity(c.clauses.len());
                for (i, clause) in c.clauses.iter().enumerate() {
                    let size = match clause {
                        Clause::Member { source, .. } if info.clauses[i].deps.is_empty() => {
                            self.eval(source)?.elements().ok().map(|e| e.len())
                        }
                        _ => None,
                    };
                    sizes.push(size);
                }
                sizes
            }
        };
        plan_clauses(c, info, self.config.plan, &sizes)
            .map_err(|e| RuntimeError::new(RuntimeErrorKind::UnboundVariable, e.message, e.pos))
    }

    fn ir_for(&mut self, c: &Construct, info: &ConstructInfo) -> RResult<Arc<LoopIr>> {
        if self.config.plan == PlanStrategy::Greedy {
            if let Some(ir) = self.ir_cache.get(&c.id) {
                return Ok(ir.clone());
            }
        }
        let plan = self.plan_for(c, info)?;
        let ir = Arc::new(lower(c, &plan, info, &self.classes));
        if self.config.plan == PlanStrategy::Greedy {
            self.ir_cache.insert(c.id, ir.clone());
        }
        Ok(ir)
    }

    /// Lowered IR of a construct under the current configuration.
    pub fn lowered(&mut self, c: &Construct) -> RResult<Arc<LoopIr>> {
        let info = self.info(c.id);
        self.ir_for(c, &info)
    }

    pub(crate) fn eval_lowered(&mut self, c: &Construct) -> RResult<Value> {
        let info = self.info(c.id);
        let ir = self.ir_for(c, &info)?;
        self.exec_ir(&ir)
    }

    /// Runs one lowered construct in the current frame.
    pub fn exec_ir(&mut self, ir: &LoopIr) -> RResult<Value> {
        let info = self.info(ir.construct);
        let mut acc = Acc::new(ir.acc);
        let outcome = self.exec_node(&ir.body, &mut acc, &info, ir.pos);
        self.clear_logic(&info);
        match outcome? {
            Some(b) => Ok(Value::Bool(b)),
            None => acc.finish(ir.op.keyword(), ir.pos),
        }
    }

    /// `Some(b)` means an early exit with result `b`.
    fn exec_node(&mut self, ir: &Ir, acc: &mut Acc, info: &ConstructInfo, pos: Pos) -> RResult<Option<bool>> {
        match ir {
            Ir::Seq(items) => {
                for item in items {
                    if let Some(b) = self.exec_node(item, acc, info, pos)? {
                        return Ok(Some(b));
                    }
                }
                Ok(None)
            }
            Ir::LoopOver { pat, source, body, .. } => {
                let src = self.eval(source)?;
                collection_check(&src, source.pos)?;
                let elems = src.elements().map_err(|e| RuntimeError::from_value(e, source.pos))?;
                for i in 0..elems.len() {
                    self.stats.ir_iterations += 1;
                    if self.match_ir(pat, elems.get(i), source.pos)? {
                        if let Some(b) = self.exec_node(body, acc, info, pos)? {
                            return Ok(Some(b));
                        }
                    }
                }
                Ok(None)
            }
            Ir::IfMember { pat, source, body, .. } => {
                let src = self.eval(source)?;
                collection_check(&src, source.pos)?;
                let found = if pat.has_wildcard() {
                    let elems = src.elements().map_err(|e| RuntimeError::from_value(e, source.pos))?;
                    let mut found = false;
                    for i in 0..elems.len() {
                        self.stats.ir_iterations += 1;
                        if self.match_ir(pat, elems.get(i), source.pos)? {
                            found = true;
                            break;
                        }
                    }
                    found
                } else {
                    let needle = self.pattern_value(pat, source.pos)?;
                    src.contains(&needle)
                        .map_err(|e| RuntimeError::from_value(e, source.pos))?
                };
                if found {
                    self.exec_node(body, acc, info, pos)
                } else {
                    Ok(None)
                }
            }
            Ir::If { cond, negate, body } => {
                let v = self.eval(cond)?;
                let b = match v {
                    Value::Bool(b) => b,
                    other => {
                        return Err(RuntimeError::new(
                            RuntimeErrorKind::TypeMismatch,
                            format!("condition must be a bool, found {}", other.kind_name()),
                            cond.pos,
                        ))
                    }
                };
                if b != *negate {
                    self.exec_node(body, acc, info, pos)
                } else {
                    Ok(None)
                }
            }
            Ir::AccUpdate(head) => {
                let v = self.eval(head)?;
                acc.update(v, head.pos)?;
                Ok(None)
            }
            Ir::StoreWitness(_) => {
                self.write_witnesses(info, pos)?;
                Ok(None)
            }
            Ir::BreakOut(b) => Ok(Some(*b)),
        }
    }

    fn match_ir(&mut self, pat: &IrPat, v: &Value, pos: Pos) -> RResult<bool> {
        match pat {
            IrPat::Bind(var) => {
                self.frame_mut().logic.insert(*var, v.clone());
                Ok(true)
            }
            IrPat::CheckLogic(var) => Ok(value_eq(&self.logic_value(*var, pos)?, v)),
            IrPat::CheckOuter(name, b) => Ok(value_eq(&self.lookup_binding(name, *b, pos)?, v)),
            IrPat::Wild => Ok(true),
            IrPat::Tuple(items) => match v {
                Value::Tuple(parts) if parts.len() == items.len() => {
                    for (p, x) in items.iter().zip(parts.iter()) {
                        if !self.match_ir(p, x, pos)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                _ => Ok(false),
            },
        }
    }

    /// Value of a pattern whose names are all bound.
    fn pattern_value(&self, pat: &IrPat, pos: Pos) -> RResult<Value> {
        match pat {
            IrPat::CheckLogic(var) | IrPat::Bind(var) => self.logic_value(*var, pos),
            IrPat::CheckOuter(name, b) => self.lookup_binding(name, *b, pos),
            IrPat::Tuple(items) => Ok(Value::tuple(
                items
                    .iter()
                    .map(|p| self.pattern_value(p, pos))
                    .collect::<RResult<Vec<_>>>()?,
            )),
            IrPat::Wild => unreachable!("wildcard patterns are matched by scanning"),
        }
    }
}
