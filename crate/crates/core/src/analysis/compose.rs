use rayon::prelude::*;

use crate::analysis::slope::pivotal_derivative;
use crate::error::{Error, Result};
use crate::model::{HierarchySpec, Probability, check_odd_size};
use crate::reliability::multi_tier;

/// Largest electorate the composition searches accept.
pub const MAX_ELECTORATE: u64 = 1_000_000_000;

const TIE_TOLERANCE: f64 = 1e-12;

/// What a composition search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    /// Two-tier reliability at a fixed ε.
    ReliabilityAtEps,
    /// Product of per-layer slopes at ε = 0.5.
    SlopeAtHalf,
    /// Fewest aligned voters that decide the outcome.
    FewestVoters,
}

impl ScoreKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreKind::ReliabilityAtEps => "reliability_at_eps",
            ScoreKind::SlopeAtHalf => "slope_at_half",
            ScoreKind::FewestVoters => "fewest_voters",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Group sizes, bottom layer first.
    pub layers: Vec<u64>,
    pub score: f64,
}

/// Every scored factorization of an electorate plus the minimizing one.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionReport {
    pub electorate_size: u64,
    pub score_kind: ScoreKind,
    /// ε used by [`ScoreKind::ReliabilityAtEps`].
    pub epsilon: Option<f64>,
    pub candidates: Vec<Candidate>,
    pub argmin: Vec<u64>,
    pub argmin_score: f64,
    /// More than one candidate scored within 1e-12 of the minimum.
    pub tie: bool,
}

impl CompositionReport {
    fn from_candidates(
        electorate_size: u64,
        score_kind: ScoreKind,
        epsilon: Option<f64>,
        candidates: Vec<Candidate>,
    ) -> Self {
        let min = candidates
            .iter()
            .map(|c| c.score)
            .fold(f64::INFINITY, f64::min);
        let sort_key = |c: &Candidate| {
            let mut sorted = c.layers.clone();
            sorted.sort_unstable();
            (sorted, c.layers.clone())
        };
        let near: Vec<&Candidate> = candidates
            .iter()
            .filter(|c| c.score - min <= TIE_TOLERANCE)
            .collect();
        let best = near
            .iter()
            .min_by_key(|c| sort_key(c))
            .expect("at least one candidate");
        CompositionReport {
            electorate_size,
            score_kind,
            epsilon,
            argmin: best.layers.clone(),
            argmin_score: best.score,
            tie: near.len() > 1,
            candidates,
        }
    }

    /// Size of the top layer of the argmin (the number of groups for two
    /// tiers).
    pub fn argmin_top(&self) -> u64 {
        *self.argmin.last().expect("nonempty layers")
    }
}

fn odd_divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 2;
    }
    small.extend(large.into_iter().rev());
    small.retain(|&d| d >= 3);
    small
}

fn collect_factorizations(
    remaining: u64,
    layers_left: usize,
    min_factor: u64,
    unordered: bool,
    divisors: &[u64],
    current: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if layers_left == 1 {
        if remaining >= min_factor {
            current.push(remaining);
            out.push(current.clone());
            current.pop();
        }
        return;
    }
    for &d in divisors {
        if d < min_factor || !remaining.is_multiple_of(d) {
            continue;
        }
        // Every later factor is at least `floor`.
        let floor = if unordered { d } else { 3 };
        let needed = (1..layers_left).try_fold(1u64, |acc, _| acc.checked_mul(floor));
        if needed.is_none_or(|n| n > remaining / d) {
            if unordered {
                break;
            }
            continue;
        }
        current.push(d);
        collect_factorizations(
            remaining / d,
            layers_left - 1,
            floor,
            unordered,
            divisors,
            current,
            out,
        );
        current.pop();
    }
}

/// All ways to write `electorate` as a product of `layers` odd factors, each
/// at least 3.
///
/// With `ordered` every permutation is a separate composition (bottom layer
/// first); otherwise factors are listed in nondecreasing order.
pub fn odd_factorizations(electorate: u64, layers: usize, ordered: bool) -> Result<Vec<Vec<u64>>> {
    if electorate > MAX_ELECTORATE {
        return Err(Error::ElectorateTooLarge(electorate));
    }
    if layers == 0 {
        return Err(Error::ZeroLayers);
    }
    let mut out = Vec::new();
    if electorate % 2 == 1 {
        let divisors = odd_divisors(electorate);
        collect_factorizations(
            electorate,
            layers,
            3,
            !ordered,
            &divisors,
            &mut Vec::new(),
            &mut out,
        );
    }
    if out.is_empty() {
        return Err(Error::NoValidFactorization(electorate, layers));
    }
    Ok(out)
}

fn slope_product(layers: &[u64]) -> f64 {
    layers
        .iter()
        .map(|&k| pivotal_derivative(k, Probability::HALF).expect("odd factor"))
        .product()
}

/// Scores every ordered split `N_d = k·l` (groups of `k`, `l` groups) by its
/// two-tier reliability at `epsilon` and returns the least reliable.
pub fn find_worst_two_tier(electorate: u64, epsilon: Probability) -> Result<CompositionReport> {
    find_worst_layout_at(electorate, 2, epsilon)
}

/// Like [`find_worst_two_tier`] for any number of layers: every ordered
/// composition is scored by its reliability at `epsilon`.
pub fn find_worst_layout_at(
    electorate: u64,
    n_layers: usize,
    epsilon: Probability,
) -> Result<CompositionReport> {
    let candidates = odd_factorizations(electorate, n_layers, true)?
        .into_par_iter()
        .map(|layers| {
            let spec = HierarchySpec::new(layers).expect("odd factors");
            let score = multi_tier(&spec, epsilon).value();
            Candidate {
                layers: spec.layer_sizes().to_vec(),
                score,
            }
        })
        .collect();
    Ok(CompositionReport::from_candidates(
        electorate,
        ScoreKind::ReliabilityAtEps,
        Some(epsilon.value()),
        candidates,
    ))
}

/// Scores every unordered `n_layers`-factor composition by the product of
/// its layer slopes at 0.5 and returns the flattest one.
pub fn find_worst_multi_tier(electorate: u64, n_layers: usize) -> Result<CompositionReport> {
    let candidates = odd_factorizations(electorate, n_layers, false)?
        .into_par_iter()
        .map(|layers| Candidate {
            score: slope_product(&layers),
            layers,
        })
        .collect();
    Ok(CompositionReport::from_candidates(
        electorate,
        ScoreKind::SlopeAtHalf,
        None,
        candidates,
    ))
}

/// Fewest voters who, by voting together, decide a hierarchy's outcome:
/// a bare majority of a bare majority of ... , i.e. `∏ (k_i + 1) / 2`.
pub fn fewest_voters(layer_sizes: &[u64]) -> Result<u64> {
    if layer_sizes.is_empty() {
        return Err(Error::EmptySpec);
    }
    layer_sizes.iter().try_fold(1u64, |acc, &k| {
        check_odd_size(k)?;
        acc.checked_mul(k.div_ceil(2))
            .ok_or(Error::ElectorateTooLarge(u64::MAX))
    })
}

/// The `n_layers`-factor composition that lets the fewest voters sway the
/// outcome.
pub fn find_fewest_voters_layout(electorate: u64, n_layers: usize) -> Result<CompositionReport> {
    let candidates = odd_factorizations(electorate, n_layers, false)?
        .into_iter()
        .map(|layers| Candidate {
            score: fewest_voters(&layers).expect("odd factors") as f64,
            layers,
        })
        .collect();
    Ok(CompositionReport::from_candidates(
        electorate,
        ScoreKind::FewestVoters,
        None,
        candidates,
    ))
}
