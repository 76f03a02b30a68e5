//! Exact evaluation of `S(χ, g, f, p^m)`: direct summation, local sums, the
//! reduction to pure sums at critical points, a recursive evaluator, the
//! multiplicity-one closed form and the degenerate rewrite.

mod brute;
mod degenerate;
mod fast;
mod multone;
mod reduce;
mod value;

pub use brute::{
    brute_sum, brute_sum_masked, dlog_table, domain_size, local_sum, local_sum_mod4, ResidueMask,
};
pub use degenerate::{degenerate_reduce, DegenerateReduction};
pub use fast::{fast_eval, ClassPlan, Evaluator, PlannedTerm, ReductionTrace, StepKind, TraceEdge};
pub use multone::{eval_mult_one, MultOneValue};
pub use reduce::{
    in_domain, reduce_step, reduction_margin, reduction_shapes, summand_root, ReduceOutcome,
    ReducedTerm, TermShape,
};
pub use value::{root_of_unity, Root, SumValue};
