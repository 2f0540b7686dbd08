//! Reliability of homogeneous direct and hierarchical majority votes.
//!
//! Majority tails are evaluated in log space through [`LogSplit`], which
//! carries `ln p` and `ln(1 - p)` side by side. Keeping both logs lets a tail
//! near 0 or near 1 be represented without cancellation, which matters once
//! electorates reach a few thousand voters and the tails drop below the
//! smallest normal double.

use rayon::prelude::*;

use crate::Error;
use crate::error::Result;
use crate::model::{HierarchySpec, Probability, SweepResult, SweepRow, check_odd_size};

/// A probability stored as the pair `(ln p, ln(1 - p))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSplit {
    pub ln_p: f64,
    pub ln_q: f64,
}

impl LogSplit {
    pub const CERTAIN: LogSplit = LogSplit {
        ln_p: 0.0,
        ln_q: f64::NEG_INFINITY,
    };
    pub const IMPOSSIBLE: LogSplit = LogSplit {
        ln_p: f64::NEG_INFINITY,
        ln_q: 0.0,
    };

    pub fn from_prob(p: Probability) -> Self {
        let p = p.value();
        // 1 - p is exact for p >= 0.5.
        let ln_q = if p >= 0.5 {
            (1.0 - p).ln()
        } else {
            (-p).ln_1p()
        };
        LogSplit { ln_p: p.ln(), ln_q }
    }

    /// The probability, taken from whichever side is smaller.
    pub fn prob(self) -> Probability {
        let p = if self.ln_p <= self.ln_q {
            self.ln_p.exp()
        } else {
            -self.ln_q.exp_m1()
        };
        Probability::from_computed(p)
    }

    pub fn complement(self) -> Self {
        LogSplit {
            ln_p: self.ln_q,
            ln_q: self.ln_p,
        }
    }
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    fn add(&mut self, t: f64) {
        if t <= self.max {
            self.sum += (t - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - t).exp() + 1.0;
            self.max = t;
        }
    }

    fn ln(self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Strict-majority split of `n` (odd) independent votes, each correct with the
/// probability encoded by `vote`.
///
/// Returns `(ln P(X >= m), ln P(X < m))` with `m = (n + 1) / 2`. The binomial
/// terms are generated by their ratio recurrence walking outward from the
/// mode, so no binomial coefficient is ever formed explicitly.
pub fn majority_split(n: u64, vote: LogSplit) -> LogSplit {
    debug_assert!(n % 2 == 1);
    if vote.ln_q == f64::NEG_INFINITY {
        return LogSplit::CERTAIN;
    }
    if vote.ln_p == f64::NEG_INFINITY {
        return LogSplit::IMPOSSIBLE;
    }
    let threshold = n.div_ceil(2);
    let log_odds = vote.ln_p - vote.ln_q;
    let p = vote.ln_p.exp();
    let mode = (((n + 1) as f64 * p).floor() as u64).min(n);

    let mut upper = LogSum::new();
    let mut lower = LogSum::new();
    let mut push = |j: u64, t: f64| {
        if j >= threshold {
            upper.add(t);
        } else {
            lower.add(t);
        }
    };

    // Terms relative to the mode term, in log space.
    push(mode, 0.0);
    let mut t = 0.0;
    for j in mode..n {
        t += ((n - j) as f64 / (j + 1) as f64).ln() + log_odds;
        push(j + 1, t);
    }
    t = 0.0;
    for j in (1..=mode).rev() {
        t += (j as f64 / (n - j + 1) as f64).ln() - log_odds;
        push(j - 1, t);
    }

    let (ln_up, ln_low) = (upper.ln(), lower.ln());
    let total = ln_add(ln_up, ln_low);
    LogSplit {
        ln_p: ln_up - total,
        ln_q: ln_low - total,
    }
}

/// Probability that a strict majority of `n_voters` independent voters, each
/// correct with probability `epsilon`, is correct.
pub fn binomial_tail(n_voters: u64, epsilon: Probability) -> Result<Probability> {
    check_odd_size(n_voters)?;
    Ok(majority_split(n_voters, LogSplit::from_prob(epsilon)).prob())
}

/// Bottom-up fold of the majority tail over every layer, in log space.
pub fn multi_tier_split(spec: &HierarchySpec, epsilon: Probability) -> LogSplit {
    spec.layer_sizes()
        .iter()
        .fold(LogSplit::from_prob(epsilon), |acc, &k| {
            majority_split(k, acc)
        })
}

/// Reliability of a hierarchy with arbitrary (odd) per-layer group sizes.
pub fn multi_tier(spec: &HierarchySpec, epsilon: Probability) -> Probability {
    multi_tier_split(spec, epsilon).prob()
}

/// Reliability of a regular tree where every layer uses the same group size.
pub fn recursive_majority(spec: &HierarchySpec, epsilon: Probability) -> Result<Probability> {
    if spec.uniform_size().is_none() {
        return Err(Error::NonUniformHierarchy(spec.layer_sizes().to_vec()));
    }
    Ok(multi_tier(spec, epsilon))
}

/// `l` groups of `k` voters: a group majority followed by a majority over
/// groups.
pub fn two_tier(k: u64, l: u64, epsilon: Probability) -> Result<Probability> {
    check_odd_size(k)?;
    check_odd_size(l)?;
    let groups = majority_split(k, LogSplit::from_prob(epsilon));
    Ok(majority_split(l, groups).prob())
}

/// Direct majority over the whole electorate of `spec`, in log space.
pub fn direct_split(spec: &HierarchySpec, epsilon: Probability) -> LogSplit {
    majority_split(spec.electorate_size(), LogSplit::from_prob(epsilon))
}

/// Compares direct voting over all `N_d` voters with the hierarchy `spec` at
/// every grid point.
pub fn sweep_compare(spec: &HierarchySpec, epsilon_grid: &[Probability]) -> Result<SweepResult> {
    let rows = epsilon_grid
        .par_iter()
        .map(|&eps| {
            let p_direct = direct_split(spec, eps).prob().value();
            let p_hier = multi_tier(spec, eps).value();
            SweepRow {
                epsilon: eps.value(),
                p_direct,
                p_hier,
                diff: p_direct - p_hier,
                ..Default::default()
            }
        })
        .collect();
    SweepResult::new(rows)
}
