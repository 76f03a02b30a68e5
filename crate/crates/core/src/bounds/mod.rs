//! Classification of sums and the explicit upper bounds.

mod classify;
mod formulas;
pub mod invariants;
mod report;

pub(crate) use classify::classify_masked;
pub use classify::{
    classify, decompose, dimension_params, first_residue, truncation_j, truncation_l, ClassKind,
    Classification, Decomposition,
};
pub use formulas::{
    beta, degen_bound, in_domain_points, lambda, laurent_applies, local_bound, nondegen_bound,
    pure_bound, pure_params, scaled_power, structured_bound, weil_bounds, LocalBound, NamedBound,
    PureBound, StructuredBounds,
};
pub use report::{best_bound, BoundReport, ReportCache, ReportKey, BOUND_NAMES};
