//! Abstention: the uniform multinomial model and heterogeneous group sizes
//! derived from per-group abstention rates.
//!
//! With uniform abstention a voter is correct with probability ε, abstains
//! with probability α and is wrong otherwise. A group decides correctly when
//! its correct votes exceed half of *all* its seats.

use crate::error::{Error, Result};
use crate::model::{GroupProfile, HeteroSystem, Probability, check_odd_size};

// Slack for α + ε summing to just over 1 through rounding.
const ALPHA_SLACK: f64 = 1e-12;

fn check_alpha(alpha: Probability, success: Probability) -> Result<f64> {
    let limit = 1.0 - success.value();
    if alpha.value() > limit + ALPHA_SLACK {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.value(),
            limit,
        });
    }
    Ok((limit - alpha.value()).max(0.0))
}

/// `x · ln(p)` with the convention `0 · ln 0 = 0`.
fn xlogy(x: u64, ln_p: f64) -> f64 {
    if x == 0 { 0.0 } else { x as f64 * ln_p }
}

/// Sum of the trinomial terms over all outcomes `(x1, x2, x3)` with
/// `x1 >= ⌈k/2⌉` correct votes, `x2` abstentions and `x3 = k - x1 - x2` wrong
/// votes.
fn trinomial_majority(k: u64, success: f64, alpha: f64, wrong: f64) -> f64 {
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=k).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let (ls, la, lw) = (success.ln(), alpha.ln(), wrong.ln());
    let mut total = 0.0;
    for x1 in k.div_ceil(2)..=k {
        for x2 in 0..=k - x1 {
            let x3 = k - x1 - x2;
            let ln_term = ln_fact[k as usize]
                - ln_fact[x1 as usize]
                - ln_fact[x2 as usize]
                - ln_fact[x3 as usize]
                + xlogy(x1, ls)
                + xlogy(x2, la)
                + xlogy(x3, lw);
            total += ln_term.exp();
        }
    }
    total
}

/// Probability that a group of `k` seats returns a correct majority when each
/// seat is correct with probability `success` and abstains with `alpha`.
///
/// Requires `alpha <= 1 - success`.
pub fn uniform_abstention_tier(
    k: u64,
    success: Probability,
    alpha: Probability,
) -> Result<Probability> {
    check_odd_size(k)?;
    let wrong = check_alpha(alpha, success)?;
    Ok(Probability::from_computed(trinomial_majority(
        k,
        success.value(),
        alpha.value(),
        wrong,
    )))
}

/// Two tiers under uniform abstention. The second tier applies the same
/// trinomial tail to the groups, reusing `alpha` as the group-level
/// abstention probability.
pub fn uniform_abstention_two_tier(
    k: u64,
    l: u64,
    epsilon: Probability,
    alpha: Probability,
) -> Result<Probability> {
    check_odd_size(l)?;
    let p1 = uniform_abstention_tier(k, epsilon, alpha)?;
    uniform_abstention_tier(l, p1, alpha)
}

/// Voters left in group `group` of base size `base_size` once a fraction
/// `alpha` abstains: `round(base_size (1 - alpha))`, which must be odd and at
/// least 3.
pub fn effective_size(group: usize, base_size: u64, alpha: Probability) -> Result<u64> {
    let size = (base_size as f64 * (1.0 - alpha.value())).round() as u64;
    if size.is_multiple_of(2) {
        return Err(Error::EffectiveSizeEven { group, size });
    }
    if size < 3 {
        return Err(Error::EffectiveSizeTooSmall { group, size });
    }
    Ok(size)
}

/// Builds a heterogeneous system from base group sizes and abstention rates.
///
/// Effective sizes are `round(k_j (1 - α_j))` and must come out odd and at
/// least 3; nothing is adjusted to make them fit.
pub fn build_hetero_system(
    base_sizes: &[u64],
    alphas: &[Probability],
    epsilons: &[Probability],
) -> Result<HeteroSystem> {
    if alphas.len() != base_sizes.len() {
        return Err(Error::LengthMismatch(base_sizes.len(), alphas.len()));
    }
    if epsilons.len() != base_sizes.len() {
        return Err(Error::LengthMismatch(base_sizes.len(), epsilons.len()));
    }
    let groups = base_sizes
        .iter()
        .zip(alphas)
        .zip(epsilons)
        .enumerate()
        .map(|(group, ((&k, &alpha), &eps))| {
            GroupProfile::new(effective_size(group, k, alpha)?, eps, alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    HeteroSystem::new(groups)
}
