//! Loop IR for one construct.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::plan::{Plan, StepKind};
use crate::frontend::ast::{Clause, Construct, ConstructId, ConstructOp, Expr, Ident, Pattern, Pos};
use crate::frontend::{expr_source, pattern_source};
use alloc::collections::BTreeMap;

use crate::frontend::ast::NodeId;
use crate::resolve::{Binding, ConstructInfo, VarClass, VarId};

/// A membership pattern with every name classified for matching.
#[derive(Clone, Debug, PartialEq)]
pub enum IrPat {
    Bind(VarId),
    /// Equal to a logic variable of this construct bound earlier.
    CheckLogic(VarId),
    /// Equal to an outer value.
    CheckOuter(Ident, Binding),
    Wild,
    Tuple(Vec<IrPat>),
}

impl IrPat {
    pub fn binds(&self) -> bool {
        match self {
            IrPat::Bind(_) => true,
            IrPat::Tuple(items) => items.iter().any(IrPat::binds),
            _ => false,
        }
    }

    pub fn has_wildcard(&self) -> bool {
        match self {
            IrPat::Wild => true,
            IrPat::Tuple(items) => items.iter().any(IrPat::has_wildcard),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccKind {
    Set,
    List,
    Sum,
    Prod,
    Count,
    Max,
    Min,
    /// `each`: true unless an early exit says otherwise.
    All,
    /// `some`: false unless an early exit says otherwise.
    Any,
}

impl AccKind {
    pub fn of(op: ConstructOp) -> AccKind {
        match op {
            ConstructOp::Each => AccKind::All,
            ConstructOp::Some => AccKind::Any,
            ConstructOp::SetOf => AccKind::Set,
            ConstructOp::ListOf => AccKind::List,
            ConstructOp::SumOf => AccKind::Sum,
            ConstructOp::ProductOf => AccKind::Prod,
            ConstructOp::CountOf => AccKind::Count,
            ConstructOp::MaxOf => AccKind::Max,
            ConstructOp::MinOf => AccKind::Min,
        }
    }

    fn name(self) -> &'static str {
        match self {
            AccKind::Set => "set",
            AccKind::List => "list",
            AccKind::Sum => "sum",
            AccKind::Prod => "prod",
            AccKind::Count => "count",
            AccKind::Max => "max",
            AccKind::Min => "min",
            AccKind::All => "all",
            AccKind::Any => "any",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Ir {
    Seq(Vec<Ir>),
    LoopOver {
        clause: usize,
        pat: IrPat,
        source: Expr,
        body: Box<Ir>,
    },
    /// Containment test of an already bound pattern.
    IfMember {
        clause: usize,
        pat: IrPat,
        source: Expr,
        body: Box<Ir>,
    },
    If {
        cond: Expr,
        negate: bool,
        body: Box<Ir>,
    },
    AccUpdate(Expr),
    StoreWitness(Vec<VarId>),
    BreakOut(bool),
}

#[derive(Clone, Debug)]
pub struct LoopIr {
    pub construct: ConstructId,
    pub op: ConstructOp,
    pub pos: Pos,
    pub acc: AccKind,
    pub body: Ir,
    /// Variable names indexed by `VarId::index`, for dumps and write-back.
    pub var_names: Vec<Ident>,
}

/// Name classes of a resolved program.
pub type Classes = BTreeMap<NodeId, VarClass>;

fn lower_pattern(p: &Pattern, classes: &Classes, fresh: &mut Vec<VarId>) -> IrPat {
    match p {
        Pattern::Wild(_) => IrPat::Wild,
        Pattern::Tuple(items, _) => IrPat::Tuple(items.iter().map(|q| lower_pattern(q, classes, fresh)).collect()),
        Pattern::Name(name, id, _) => match classes.get(id).copied() {
            Some(VarClass::LogicVar(v)) => {
                if fresh.contains(&v) {
                    fresh.retain(|x| *x != v);
                    IrPat::Bind(v)
                } else {
                    IrPat::CheckLogic(v)
                }
            }
            Some(VarClass::OuterRef(b)) => IrPat::CheckOuter(name.clone(), b),
            // a resolved program classifies every pattern name
            Some(VarClass::Builtin) | None => IrPat::CheckOuter(name.clone(), Binding::Global),
        },
    }
}

fn lower_steps(c: &Construct, plan: &Plan, classes: &Classes, innermost: Ir) -> Ir {
    let mut patterns: Vec<Option<IrPat>> = vec![None; c.clauses.len()];
    for step in &plan.steps {
        if let Clause::Member { pattern, .. } = &c.clauses[step.clause] {
            let mut fresh: Vec<VarId> = step.bound_after.difference(&step.bound_before).copied().collect();
            patterns[step.clause] = Some(lower_pattern(pattern, classes, &mut fresh));
        }
    }
    let mut ir = innermost;
    for step in plan.steps.iter().rev() {
        let body = Box::new(ir);
        ir = match (&c.clauses[step.clause], step.kind) {
            (Clause::Member { source, .. }, StepKind::Loop) => Ir::LoopOver {
                clause: step.clause,
                pat: patterns[step.clause].take().expect("pattern lowered"),
                source: source.clone(),
                body,
            },
            (Clause::Member { source, .. }, _) => Ir::IfMember {
                clause: step.clause,
                pat: patterns[step.clause].take().expect("pattern lowered"),
                source: source.clone(),
                body,
            },
            (Clause::Cond(e), _) => Ir::If {
                cond: e.clone(),
                negate: false,
                body,
            },
        };
    }
    ir
}

fn finish(c: &Construct, info: &ConstructInfo, body: Ir) -> LoopIr {
    LoopIr {
        construct: c.id,
        op: c.op,
        pos: c.pos,
        acc: AccKind::of(c.op),
        body,
        var_names: info.vars.iter().map(|v| v.name.clone()).collect(),
    }
}

/// `each`: exit false on the first tuple whose predicate fails.
/// `some`: on the first tuple whose predicate holds, store witnesses and exit true.
pub fn lower_quant(c: &Construct, plan: &Plan, info: &ConstructInfo, classes: &Classes) -> LoopIr {
    let innermost = match c.op {
        ConstructOp::Each => Ir::If {
            cond: c.body.clone(),
            negate: true,
            body: Box::new(Ir::BreakOut(false)),
        },
        _ => Ir::If {
            cond: c.body.clone(),
            negate: false,
            body: Box::new(Ir::Seq(vec![
                Ir::StoreWitness(info.witnesses.clone()),
                Ir::BreakOut(true),
            ])),
        },
    };
    finish(c, info, lower_steps(c, plan, classes, innermost))
}

/// Comprehensions and aggregations: one accumulator update per tuple.
pub fn lower_compr_aggr(c: &Construct, plan: &Plan, info: &ConstructInfo, classes: &Classes) -> LoopIr {
    finish(c, info, lower_steps(c, plan, classes, Ir::AccUpdate(c.body.clone())))
}

pub fn lower(c: &Construct, plan: &Plan, info: &ConstructInfo, classes: &Classes) -> LoopIr {
    if c.op.is_quantifier() {
        lower_quant(c, plan, info, classes)
    } else {
        lower_compr_aggr(c, plan, info, classes)
    }
}

fn pat_text(p: &IrPat, names: &[Ident]) -> String {
    match p {
        IrPat::Bind(v) => String::from(&*names[v.index as usize]),
        IrPat::CheckLogic(v) => format!("={}", names[v.index as usize]),
        IrPat::CheckOuter(n, _) => format!("={}", n),
        IrPat::Wild => String::from("_"),
        IrPat::Tuple(items) => {
            let parts: Vec<String> = items.iter().map(|q| pat_text(q, names)).collect();
            if parts.len() == 1 {
                format!("({},)", parts[0])
            } else {
                format!("({})", parts.join(", "))
            }
        }
    }
}

fn dump_node(ir: &Ir, names: &[Ident], depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    match ir {
        Ir::Seq(items) => items.iter().for_each(|i| dump_node(i, names, depth, out)),
        Ir::LoopOver { pat, source, body, .. } => {
            out.push_str(&format!(
                "{}for {} in {}:\n",
                indent,
                pat_text(pat, names),
                expr_source(source)
            ));
            dump_node(body, names, depth + 1, out);
        }
        Ir::IfMember { pat, source, body, .. } => {
            out.push_str(&format!(
                "{}if {} in {}:\n",
                indent,
                pat_text(pat, names),
                expr_source(source)
            ));
            dump_node(body, names, depth + 1, out);
        }
        Ir::If { cond, negate, body } => {
            let text = expr_source(cond);
            if *negate {
                out.push_str(&format!("{}if not ({}):\n", indent, text));
            } else {
                out.push_str(&format!("{}if {}:\n", indent, text));
            }
            dump_node(body, names, depth + 1, out);
        }
        Ir::AccUpdate(e) => out.push_str(&format!("{}acc <- {}\n", indent, expr_source(e))),
        Ir::StoreWitness(vars) => {
            let list: Vec<&str> = vars.iter().map(|v| &*names[v.index as usize]).collect();
            out.push_str(&format!("{}store_witness {}\n", indent, list.join(", ")));
        }
        Ir::BreakOut(b) => out.push_str(&format!("{}break_out {}\n", indent, if *b { "True" } else { "False" })),
    }
}

/// Indented pseudocode for one lowered construct.
pub fn dump_ir(ir: &LoopIr) -> String {
    let mut out = format!("{} #{} at {}\n", ir.op.keyword(), ir.construct.0, ir.pos);
    out.push_str(&format!("  acc = init {}\n", ir.acc.name()));
    dump_node(&ir.body, &ir.var_names, 1, &mut out);
    out.push_str(&format!("  result {}\n", ir.acc.name()));
    out
}

/// Source text of a pattern as written, for diagnostics.
pub fn describe_pattern(p: &Pattern) -> String {
    pattern_source(p)
}
