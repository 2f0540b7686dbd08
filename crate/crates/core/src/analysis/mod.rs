//! Slope analysis at the ε = 0.5 fixed point, searches over group
//! compositions of a fixed electorate, and numeric theorem checks.

mod compose;
mod slope;
mod theorem;

pub use compose::{
    Candidate, CompositionReport, MAX_ELECTORATE, ScoreKind, fewest_voters,
    find_fewest_voters_layout, find_worst_layout_at, find_worst_multi_tier, find_worst_two_tier,
    odd_factorizations,
};
pub use slope::{
    asymptotic_slope, direct_slope_at_half, hier_slope_at_half, pivotal_derivative,
    two_tier_slope_product,
};
pub use theorem::{Theorem1Report, theorem1_verify};
