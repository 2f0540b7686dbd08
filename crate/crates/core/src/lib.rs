//! Reliability analysis for direct and hierarchical majority voting.
//!
//! The crate computes the probability that a majority vote reaches the
//! correct outcome when every voter is independently correct with some
//! probability ε, for
//!
//! * direct votes among `N` voters ([`reliability::binomial_tail`]),
//! * trees of nested group majorities ([`reliability::multi_tier`]),
//! * voters and groups with heterogeneous competence ([`hetero`]),
//! * uniform and group-specific abstention ([`abstention`]).
//!
//! [`bounds`] holds the Hoeffding lower bounds, [`analysis`] the slope
//! comparisons at ε = 0.5 and the searches over group compositions, and
//! [`montecarlo`] a seeded ballot simulator used to validate all of the
//! above.

pub mod abstention;
pub mod analysis;
pub mod bounds;
mod error;
pub mod hetero;
pub mod model;
pub mod montecarlo;
pub mod reliability;

pub use error::{Error, Result};
pub use model::{
    CompetenceRule, GroupProfile, HeteroSystem, HierarchySpec, ParametricGroup, ParametricSystem,
    Probability, SweepResult, SweepRow, validate_hierarchy,
};
