//! Clause planning and lowering of constructs to loop IR.

pub mod ir;
pub mod plan;

pub use ir::{dump_ir, lower, lower_compr_aggr, lower_quant, AccKind, Ir, IrPat, LoopIr};
pub use plan::{plan_clauses, Plan, PlanError, PlanStrategy, Step, StepKind};

use crate::resolve::ResolvedProgram;

/// Plans every construct of the program with the greedy strategy, so that
/// unschedulable constructs are reported before execution.
pub fn check_plans(rp: &ResolvedProgram) -> Result<(), PlanError> {
    for c in rp.ast.constructs() {
        plan_clauses(c, rp.construct(c.id), PlanStrategy::Greedy, &[])?;
    }
    Ok(())
}
