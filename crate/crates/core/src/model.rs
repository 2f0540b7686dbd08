//! Domain types shared by the analytic and simulation modules.
//!
//! Every constructor validates its input and rejects out-of-range values;
//! nothing is clamped.

use std::fmt;

use crate::error::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::ProbabilityOutOfRange(value))
        }
    }

    /// Wraps a value already known to lie in `[0, 1]`. Values produced by the
    /// analytic routines can drift a few ulps outside; those are snapped back.
    pub(crate) fn from_computed(value: f64) -> Self {
        debug_assert!(
            value > -1e-9 && value < 1.0 + 1e-9,
            "computed probability {value} is out of range"
        );
        Probability(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn complement(self) -> Probability {
        Probability(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Checks that a single group size can host a tie-free majority vote.
pub(crate) fn check_odd_size(size: u64) -> Result<()> {
    if size.is_multiple_of(2) {
        Err(Error::EvenGroupSize(size))
    } else {
        Ok(())
    }
}

/// Per-layer group sizes of a majority tree, bottom layer first.
///
/// Layer `i` groups `layer_sizes[i]` units of layer `i - 1` (voters for the
/// bottom layer), so the electorate holds the product of all sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HierarchySpec {
    layer_sizes: Vec<u64>,
    electorate: u64,
}

impl HierarchySpec {
    /// Validates `layer_sizes`. The only accepted size below 3 is the
    /// single-voter electorate `[1]`.
    pub fn new(layer_sizes: Vec<u64>) -> Result<Self> {
        if layer_sizes.is_empty() {
            return Err(Error::EmptySpec);
        }
        for &size in &layer_sizes {
            check_odd_size(size)?;
        }
        let trivial = layer_sizes == [1];
        if !trivial && let Some(&size) = layer_sizes.iter().find(|&&s| s < 3) {
            return Err(Error::GroupTooSmall(size));
        }
        let electorate = layer_sizes
            .iter()
            .try_fold(1u64, |acc, &s| acc.checked_mul(s))
            .ok_or(Error::ElectorateTooLarge(u64::MAX))?;
        Ok(HierarchySpec {
            layer_sizes,
            electorate,
        })
    }

    /// `layers` layers of `k`-sized groups.
    pub fn uniform(k: u64, layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::ZeroLayers);
        }
        HierarchySpec::new(vec![k; layers])
    }

    pub fn layer_sizes(&self) -> &[u64] {
        &self.layer_sizes
    }

    /// Number of layers `n`.
    pub fn layers(&self) -> usize {
        self.layer_sizes.len()
    }

    /// Total number of voters, the product of all layer sizes.
    pub fn electorate_size(&self) -> u64 {
        self.electorate
    }

    /// The common group size if every layer uses the same one.
    pub fn uniform_size(&self) -> Option<u64> {
        let first = self.layer_sizes[0];
        self.layer_sizes
            .iter()
            .all(|&s| s == first)
            .then_some(first)
    }
}

/// Validating constructor for [`HierarchySpec`].
pub fn validate_hierarchy(layer_sizes: &[u64]) -> Result<HierarchySpec> {
    HierarchySpec::new(layer_sizes.to_vec())
}

/// One bottom-layer group of a heterogeneous two-tier system.
///
/// `effective_size` counts the voters that actually cast a ballot and is what
/// every formula uses; `abstention` is carried along for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupProfile {
    effective_size: u64,
    competence: Probability,
    abstention: Probability,
}

impl GroupProfile {
    pub fn new(
        effective_size: u64,
        competence: Probability,
        abstention: Probability,
    ) -> Result<Self> {
        check_odd_size(effective_size)?;
        if effective_size < 3 {
            return Err(Error::GroupTooSmall(effective_size));
        }
        Ok(GroupProfile {
            effective_size,
            competence,
            abstention,
        })
    }

    pub fn effective_size(&self) -> u64 {
        self.effective_size
    }

    pub fn competence(&self) -> Probability {
        self.competence
    }

    pub fn abstention(&self) -> Probability {
        self.abstention
    }
}

/// An odd number of heterogeneous groups aggregated by a top-level majority.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroSystem {
    groups: Vec<GroupProfile>,
}

impl HeteroSystem {
    pub fn new(groups: Vec<GroupProfile>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::EmptySystem);
        }
        if groups.len().is_multiple_of(2) {
            return Err(Error::EvenGroupCount(groups.len()));
        }
        Ok(HeteroSystem { groups })
    }

    pub fn groups(&self) -> &[GroupProfile] {
        &self.groups
    }

    /// Size of the equivalent direct electorate, the sum of effective sizes.
    pub fn electorate_size(&self) -> u64 {
        self.groups.iter().map(|g| g.effective_size).sum()
    }

    /// Competence of every participating voter, group by group.
    pub fn voter_probs(&self) -> Vec<Probability> {
        self.groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.competence, g.effective_size as usize))
            .collect()
    }
}

/// How a group's competence follows the swept parameter ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompetenceRule {
    /// competence = ε
    Eps,
    /// competence = 1 − ε
    OneMinusEps,
    /// competence pinned to a fixed value
    Fixed(Probability),
}

impl CompetenceRule {
    pub fn at(self, epsilon: Probability) -> Probability {
        match self {
            CompetenceRule::Eps => epsilon,
            CompetenceRule::OneMinusEps => epsilon.complement(),
            CompetenceRule::Fixed(p) => p,
        }
    }
}

/// A group whose competence is a function of ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricGroup {
    pub effective_size: u64,
    pub rule: CompetenceRule,
    pub abstention: Probability,
}

/// A family of heterogeneous systems indexed by ε, e.g. two groups at ε and
/// one at 1 − ε.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricSystem {
    groups: Vec<ParametricGroup>,
}

impl ParametricSystem {
    pub fn new(groups: Vec<ParametricGroup>) -> Result<Self> {
        let system = ParametricSystem { groups };
        // Validate sizes and group count once, at an arbitrary ε.
        system.at(Probability::HALF)?;
        Ok(system)
    }

    pub fn groups(&self) -> &[ParametricGroup] {
        &self.groups
    }

    pub fn at(&self, epsilon: Probability) -> Result<HeteroSystem> {
        let groups = self
            .groups
            .iter()
            .map(|g| GroupProfile::new(g.effective_size, g.rule.at(epsilon), g.abstention))
            .collect::<Result<Vec<_>>>()?;
        HeteroSystem::new(groups)
    }
}

/// One ε row of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepRow {
    pub epsilon: f64,
    pub p_direct: f64,
    pub p_hier: f64,
    /// `p_direct - p_hier`
    pub diff: f64,
    pub bound_direct: Option<f64>,
    pub bound_hier: Option<f64>,
    pub mc_estimate: Option<f64>,
    pub mc_stderr: Option<f64>,
}

/// Rows of a sweep, ordered by strictly increasing ε.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn new(rows: Vec<SweepRow>) -> Result<Self> {
        check_grid(rows.iter().map(|r| r.epsilon))?;
        Ok(SweepResult { rows })
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<SweepRow> {
        self.rows
    }
}

pub(crate) fn check_grid(grid: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for (i, eps) in grid.into_iter().enumerate() {
        if eps <= prev {
            return Err(Error::UnorderedGrid(i));
        }
        prev = eps;
    }
    Ok(())
}
