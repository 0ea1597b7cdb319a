//! The reference evaluator: nested enumeration straight from the AST.
//!
//! Memberships are enumerated left to right, except that a membership whose
//! source mentions a variable not yet bound waits until it is. Conditions and
//! the predicate are only checked once a full tuple is bound. A membership
//! whose pattern is already fully bound acts as a test.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::exec::Acc;
use super::*;
use crate::frontend::ast::{Clause, Construct, ConstructOp, Expr, Pattern};
use crate::lower::{AccKind, PlanStrategy};
use crate::resolve::Binding;

struct Schedule<'c> {
    /// (pattern, source) of each membership in enumeration order.
    members: Vec<(&'c Pattern, &'c Expr)>,
    /// Conditions in the order they are checked on a full tuple.
    conds: Vec<&'c Expr>,
}

impl<O: Output> Interpreter<O> {
    fn schedule<'c>(&mut self, c: &'c Construct, info: &ConstructInfo) -> RResult<Schedule<'c>> {
        let order: Vec<usize> = match self.config.plan {
            PlanStrategy::Sized => self.plan_for(c, info)?.membership_order(),
            PlanStrategy::Greedy => {
                let mut pending: Vec<usize> = (0..c.clauses.len())
                    .filter(|&i| matches!(c.clauses[i], Clause::Member { .. }))
                    .collect();
                let mut bound: BTreeSet<VarId> = BTreeSet::new();
                let mut order = Vec::new();
                while !pending.is_empty() {
                    let Some(k) = pending
                        .iter()
                        .position(|&i| info.clauses[i].deps.iter().all(|v| bound.contains(v)))
                    else {
                        return Err(RuntimeError::new(
                            RuntimeErrorKind::UnboundVariable,
                            "membership sources depend on each other",
                            c.pos,
                        ));
                    };
                    let i = pending.remove(k);
                    bound.extend(info.clauses[i].binds.iter().copied());
                    order.push(i);
                }
                order
            }
        };

        // a condition is checked after the conditions whose variables are
        // all bound by an earlier membership
        let mut bound: BTreeSet<VarId> = BTreeSet::new();
        let mut ready_at: Vec<(usize, usize)> = Vec::new();
        let mut conds: Vec<usize> = (0..c.clauses.len())
            .filter(|&i| matches!(c.clauses[i], Clause::Cond(_)))
            .collect();
        for step in 0..=order.len() {
            if step > 0 {
                bound.extend(info.clauses[order[step - 1]].binds.iter().copied());
            }
            conds.retain(|&i| {
                let ready = info.clauses[i].deps.is_subset(&bound);
                if ready {
                    ready_at.push((step, i));
                }
                !ready
            });
        }
        ready_at.sort();

        let members = order
            .iter()
            .map(|&i| match &c.clauses[i] {
                Clause::Member { pattern, source } => (pattern, source),
                Clause::Cond(_) => unreachable!("order holds memberships only"),
            })
            .collect();
        let conds = ready_at
            .iter()
            .map(|&(_, i)| match &c.clauses[i] {
                Clause::Cond(e) => e,
                Clause::Member { .. } => unreachable!("conditions only"),
            })
            .collect();
        Ok(Schedule { members, conds })
    }

    pub(crate) fn eval_direct(&mut self, c: &Construct) -> RResult<Value> {
        let info = self.info(c.id);
        let result = self.schedule(c, &info).and_then(|sched| {
            let mut acc = Acc::new(AccKind::of(c.op));
            let mut bound = BTreeSet::new();
            match self.enumerate(c, &info, &sched, 0, &mut bound, &mut acc)? {
                Some(b) => Ok(Value::Bool(b)),
                None => acc.finish(c.op.keyword(), c.pos),
            }
        });
        self.clear_logic(&info);
        result
    }

    fn enumerate(
        &mut self,
        c: &Construct,
        info: &ConstructInfo,
        sched: &Schedule<'_>,
        level: usize,
        bound: &mut BTreeSet<VarId>,
        acc: &mut Acc,
    ) -> RResult<Option<bool>> {
        if level == sched.members.len() {
            return self.full_tuple(c, info, sched, acc);
        }
        let (pattern, source) = sched.members[level];
        let src = self.eval(source)?;
        let elems = src.elements().map_err(|_| {
            RuntimeError::new(
                RuntimeErrorKind::TypeMismatch,
                format!("membership source must be a collection, found {}", src.kind_name()),
                source.pos,
            )
        })?;
        let mut fresh: Vec<VarId> = Vec::new();
        for (_, id) in pattern.names() {
            if let Some(VarClass::LogicVar(v)) = self.classes.get(&id).copied() {
                if !bound.contains(&v) && !fresh.contains(&v) {
                    fresh.push(v);
                }
            }
        }

        if fresh.is_empty() {
            let mut found = false;
            for i in 0..elems.len() {
                self.stats.direct_iterations += 1;
                if self.matches(pattern, elems.get(i), bound, &mut Vec::new(), source.pos)? {
                    found = true;
                    break;
                }
            }
            return if found {
                self.enumerate(c, info, sched, level + 1, bound, acc)
            } else {
                Ok(None)
            };
        }

        for i in 0..elems.len() {
            self.stats.direct_iterations += 1;
            if self.matches(pattern, elems.get(i), bound, &mut Vec::new(), source.pos)? {
                bound.extend(fresh.iter().copied());
                let r = self.enumerate(c, info, sched, level + 1, bound, acc);
                for v in &fresh {
                    bound.remove(v);
                }
                if let Some(b) = r? {
                    return Ok(Some(b));
                }
            }
        }
        Ok(None)
    }

    fn full_tuple(
        &mut self,
        c: &Construct,
        info: &ConstructInfo,
        sched: &Schedule<'_>,
        acc: &mut Acc,
    ) -> RResult<Option<bool>> {
        for cond in &sched.conds {
            if !self.check(cond)? {
                return Ok(None);
            }
        }
        match c.op {
            ConstructOp::Each => {
                if !self.check(&c.body)? {
                    return Ok(Some(false));
                }
            }
            ConstructOp::Some => {
                if self.check(&c.body)? {
                    self.write_witnesses(info, c.pos)?;
                    return Ok(Some(true));
                }
            }
            _ => {
                let v = self.eval(&c.body)?;
                acc.update(v, c.body.pos)?;
            }
        }
        Ok(None)
    }

    fn check(&mut self, e: &Expr) -> RResult<bool> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            other => Err(RuntimeError::new(
                RuntimeErrorKind::TypeMismatch,
                format!("condition must be a bool, found {}", other.kind_name()),
                e.pos,
            )),
        }
    }

    /// Matches `v` against `p`, binding logic variables that are neither in
    /// `bound` nor already bound earlier in this same pattern (`seen`).
    fn matches(
        &mut self,
        p: &Pattern,
        v: &Value,
        bound: &BTreeSet<VarId>,
        seen: &mut Vec<VarId>,
        pos: Pos,
    ) -> RResult<bool> {
        match p {
            Pattern::Wild(_) => Ok(true),
            Pattern::Tuple(items, _) => {
                let Value::Tuple(parts) = v else { return Ok(false) };
                if parts.len() != items.len() {
                    return Ok(false);
                }
                for (q, x) in items.iter().zip(parts.iter()) {
                    if !self.matches(q, x, bound, seen, pos)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Pattern::Name(name, id, _) => match self.classes.get(id).copied() {
                Some(VarClass::LogicVar(var)) => {
                    if bound.contains(&var) || seen.contains(&var) {
                        Ok(value_eq(&self.logic_value(var, pos)?, v))
                    } else {
                        self.frame_mut().logic.insert(var, v.clone());
                        seen.push(var);
                        Ok(true)
                    }
                }
                Some(VarClass::OuterRef(b)) => Ok(value_eq(&self.lookup_binding(name, b, pos)?, v)),
                _ => Ok(value_eq(&self.lookup_binding(name, Binding::Global, pos)?, v)),
            },
        }
    }
}
