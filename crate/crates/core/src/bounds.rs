//! Hoeffding lower bounds: a heterogeneous majority is at least as reliable
//! as the homogeneous one at the mean competence, provided the mean reaches
//! `1/2 + 1/(2n)`.

use crate::error::Result;
use crate::hetero::group_reliabilities;
use crate::model::{HeteroSystem, Probability, check_odd_size};
use crate::reliability::binomial_tail;

// The validity threshold is often met with equality (2/3 for three groups).
const VALIDITY_SLACK: f64 = 1e-12;

/// A bound value together with whether its validity condition holds.
///
/// The value is reported even when `valid` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingBound {
    pub bound: Probability,
    pub valid: bool,
    pub mean: f64,
}

fn mean_bound(probs: &[Probability]) -> Result<HoeffdingBound> {
    let n = probs.len() as u64;
    check_odd_size(n)?;
    let sum: f64 = probs.iter().map(|p| p.value()).sum();
    let mean = Probability::from_computed(sum / n as f64);
    // mean >= 1/2 + 1/(2n)  <=>  sum >= (n + 1) / 2
    let valid = sum >= (n + 1) as f64 / 2.0 - VALIDITY_SLACK;
    Ok(HoeffdingBound {
        bound: binomial_tail(n, mean)?,
        valid,
        mean: mean.value(),
    })
}

/// Bound on the two-tier reliability from the mean group reliability.
pub fn hoeffding_hier_bound(system: &HeteroSystem) -> HoeffdingBound {
    mean_bound(&group_reliabilities(system)).expect("group count is validated odd")
}

/// Bound on direct reliability from the mean voter competence.
pub fn hoeffding_direct_bound(voter_probs: &[Probability]) -> Result<HoeffdingBound> {
    mean_bound(voter_probs)
}
