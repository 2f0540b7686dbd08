use rayon::prelude::*;

use crate::analysis::slope::{direct_slope_at_half, hier_slope_at_half};
use crate::error::Result;
use crate::model::{HierarchySpec, Probability, check_odd_size};
use crate::reliability::{LogSplit, direct_split, multi_tier_split};

const EQUALITY_TOLERANCE: f64 = 1e-12;

/// Outcome of comparing direct and hierarchical voting on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    pub k: u64,
    pub n_layers: u32,
    /// Interior grid points checked (the three fixed points are extra).
    pub grid_points: usize,
    /// Largest `|p_d - p_n|` over ε ∈ {0, 0.5, 1}.
    pub fixed_point_max_diff: f64,
    /// Interior points where the ordering had the wrong sign.
    pub violations: usize,
    /// Largest magnitude by which a violating point was on the wrong side,
    /// measured as a log-probability gap.
    pub max_violation: f64,
    pub slope_direct: f64,
    pub slope_hier: f64,
}

impl Theorem1Report {
    pub fn fixed_points_hold(&self) -> bool {
        self.fixed_point_max_diff <= EQUALITY_TOLERANCE
    }

    /// Direct slope strictly steeper for two or more layers, equal for one.
    pub fn slopes_hold(&self) -> bool {
        if self.n_layers == 1 {
            (self.slope_direct - self.slope_hier).abs() <= EQUALITY_TOLERANCE
        } else {
            self.slope_direct > self.slope_hier
        }
    }

    pub fn passed(&self) -> bool {
        self.fixed_points_hold() && self.violations == 0 && self.slopes_hold()
    }
}

/// Signed gap of the ordering at one ε, positive when it has the expected
/// direction. Compares the smaller tails in log space so the sign survives
/// even where both reliabilities round to 0 or 1.
fn ordering_gap(eps: f64, direct: LogSplit, hier: LogSplit) -> f64 {
    if eps < 0.5 {
        // expect p_d < p_n
        hier.ln_p - direct.ln_p
    } else {
        // expect p_d > p_n, i.e. q_d < q_n
        hier.ln_q - direct.ln_q
    }
}

/// Checks on a uniform interior grid `i / (grid_points + 1)` that direct
/// voting beats an `n_layers`-level tree of `k`-sized groups above 0.5, loses
/// below it, and ties at 0, 0.5 and 1. With one layer both systems coincide,
/// so every point must tie instead.
pub fn theorem1_verify(k: u64, n_layers: u32, grid_points: usize) -> Result<Theorem1Report> {
    check_odd_size(k)?;
    let spec = HierarchySpec::uniform(k, n_layers as usize)?;

    let eval = |eps: f64| {
        let p = Probability::new(eps).expect("grid inside [0, 1]");
        (direct_split(&spec, p), multi_tier_split(&spec, p))
    };

    let fixed_point_max_diff = [0.0, 0.5, 1.0]
        .into_iter()
        .map(|eps| {
            let (d, h) = eval(eps);
            (d.prob().value() - h.prob().value()).abs()
        })
        .fold(0.0, f64::max);

    let wrong: Vec<f64> = (1..=grid_points)
        .into_par_iter()
        .filter_map(|i| {
            let eps = i as f64 / (grid_points + 1) as f64;
            let (d, h) = eval(eps);
            if n_layers == 1 || eps == 0.5 {
                let diff = (d.prob().value() - h.prob().value()).abs();
                (diff > EQUALITY_TOLERANCE).then_some(diff)
            } else {
                let gap = ordering_gap(eps, d, h);
                (gap <= 0.0).then_some(-gap)
            }
        })
        .collect();

    Ok(Theorem1Report {
        k,
        n_layers,
        grid_points,
        fixed_point_max_diff,
        violations: wrong.len(),
        max_violation: wrong.iter().copied().fold(0.0, f64::max),
        slope_direct: direct_slope_at_half(spec.electorate_size())?,
        slope_hier: hier_slope_at_half(k, n_layers)?,
    })
}
