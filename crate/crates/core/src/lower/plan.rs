//! Clause scheduling.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::frontend::ast::{Clause, Construct, ConstructId, Pos};
use crate::resolve::{ConstructInfo, VarId};

/// How membership clauses are ordered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PlanStrategy {
    /// Earliest schedulable clause in textual order.
    #[default]
    Greedy,
    /// Smallest known source first; needs source sizes at run time.
    Sized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Iterate the source, binding the pattern's unbound variables.
    Loop,
    /// Every pattern variable is already bound: containment test.
    Test,
    Cond,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub clause: usize,
    pub kind: StepKind,
    pub bound_before: BTreeSet<VarId>,
    pub bound_after: BTreeSet<VarId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub construct: ConstructId,
    pub steps: Vec<Step>,
}

impl Plan {
    /// Membership clauses (loops and tests) in scheduled order.
    pub fn membership_order(&self) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.kind != StepKind::Cond)
            .map(|s| s.clause)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanError {
    pub construct: ConstructId,
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Orders the clauses of `c`.
///
/// `sizes[i]` is the size of clause `i`'s source when it is known up front;
/// it is only consulted by [`PlanStrategy::Sized`]. Conditions are placed
/// right after the step that binds the last of their variables.
pub fn plan_clauses(
    c: &Construct,
    info: &ConstructInfo,
    strategy: PlanStrategy,
    sizes: &[Option<usize>],
) -> Result<Plan, PlanError> {
    let mut members: Vec<usize> = Vec::new();
    let mut conds: Vec<usize> = Vec::new();
    for (i, clause) in c.clauses.iter().enumerate() {
        match clause {
            Clause::Member { .. } => members.push(i),
            Clause::Cond(_) => conds.push(i),
        }
    }

    let mut bound: BTreeSet<VarId> = BTreeSet::new();
    let mut steps = Vec::with_capacity(c.clauses.len());
    let place_conds = |bound: &BTreeSet<VarId>, conds: &mut Vec<usize>, steps: &mut Vec<Step>| {
        conds.retain(|&i| {
            if info.clauses[i].deps.is_subset(bound) {
                steps.push(Step {
                    clause: i,
                    kind: StepKind::Cond,
                    bound_before: bound.clone(),
                    bound_after: bound.clone(),
                });
                false
            } else {
                true
            }
        });
    };
    place_conds(&bound, &mut conds, &mut steps);

    while !members.is_empty() {
        let ready = members
            .iter()
            .enumerate()
            .filter(|(_, &i)| info.clauses[i].deps.is_subset(&bound));
        let pick = match strategy {
            PlanStrategy::Greedy => ready.map(|(k, _)| k).next(),
            PlanStrategy::Sized => ready
                .min_by_key(|(_, &i)| (sizes.get(i).copied().flatten().unwrap_or(usize::MAX), i))
                .map(|(k, _)| k),
        };
        let Some(k) = pick else {
            let names: Vec<String> = members
                .iter()
                .flat_map(|&i| info.clauses[i].deps.iter())
                .filter(|v| !bound.contains(v))
                .map(|v| String::from(&**info.var_name(*v)))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            return Err(PlanError {
                construct: c.id,
                pos: c.pos,
                message: format!(
                    "no clause order binds {} before it is used as a membership source",
                    names.join(", ")
                ),
            });
        };
        let i = members.remove(k);
        let binds = &info.clauses[i].binds;
        let kind = if binds.iter().all(|v| bound.contains(v)) {
            StepKind::Test
        } else {
            StepKind::Loop
        };
        let before = bound.clone();
        bound.extend(binds.iter().copied());
        steps.push(Step {
            clause: i,
            kind,
            bound_before: before,
            bound_after: bound.clone(),
        });
        place_conds(&bound, &mut conds, &mut steps);
    }
    debug_assert!(conds.is_empty(), "condition deps are always bound by memberships");
    Ok(Plan { construct: c.id, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ast::{ConstructId, ExprKind, StmtKind};
    use crate::frontend::parse_source;
    use crate::resolve::{resolve, ResolvedProgram};
    use alloc::vec;

    fn plan_of(src: &str) -> Result<(Plan, ResolvedProgram), PlanError> {
        let rp = resolve(parse_source(src).unwrap()).unwrap();
        let last = rp.ast.stmts.last().unwrap();
        let StmtKind::Expr(e) = &last.kind else {
            panic!("expression statement expected")
        };
        let ExprKind::Construct(c) = &e.kind else {
            panic!("construct expected")
        };
        let info = rp.construct(c.id);
        let plan = plan_clauses(c, info, PlanStrategy::Greedy, &[])?;
        Ok((plan, rp.clone()))
    }

    fn kinds(p: &Plan) -> Vec<(usize, StepKind)> {
        p.steps.iter().map(|s| (s.clause, s.kind)).collect()
    }

    #[test]
    fn second_membership_becomes_test() {
        let (p, _) = plan_of("A = {1}\nB = {2}\nsetof(x, x in A, x in B)\n").unwrap();
        assert_eq!(kinds(&p), vec![(0, StepKind::Loop), (1, StepKind::Test)]);
    }

    #[test]
    fn dependent_source_is_reordered() {
        let (p, _) = plan_of("stations = {}\nsetof(item, item in sta, sta in stations)\n").unwrap();
        assert_eq!(p.membership_order(), vec![1, 0]);
    }

    #[test]
    fn circular_sources_fail() {
        let e = plan_of("setof(x, x in y, y in x)\n").unwrap_err();
        assert_eq!(e.construct, ConstructId(0));
        assert!(e.message.contains("x, y"));
    }

    #[test]
    fn conditions_are_hoisted() {
        let (p, _) = plan_of("A = {1}\nsetof((x, y), x in A, y in A, y > 0, x > 0, True)\n").unwrap();
        assert_eq!(
            kinds(&p),
            vec![
                (4, StepKind::Cond),
                (0, StepKind::Loop),
                (3, StepKind::Cond),
                (1, StepKind::Loop),
                (2, StepKind::Cond),
            ]
        );
        assert_eq!(p.steps[3].bound_before.len(), 1);
        assert_eq!(p.steps[3].bound_after.len(), 2);
    }

    #[test]
    fn sized_prefers_small_sources() {
        let rp = resolve(parse_source("A = {1}\nB = {2}\nsetof(x, x in A, x in B)\n").unwrap()).unwrap();
        let StmtKind::Expr(e) = &rp.ast.stmts[2].kind else {
            panic!()
        };
        let ExprKind::Construct(c) = &e.kind else { panic!() };
        let plan = plan_clauses(c, rp.construct(c.id), PlanStrategy::Sized, &[Some(10), Some(2)]).unwrap();
        assert_eq!(kinds(&plan), vec![(1, StepKind::Loop), (0, StepKind::Test)]);
    }

    #[test]
    fn deterministic() {
        let src = "E = {(1, 2)}\nsome((x,y) in E, (y,z) in E, x != z, has= True)\n";
        assert_eq!(plan_of(src).unwrap().0, plan_of(src).unwrap().0);
    }
}
