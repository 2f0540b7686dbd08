//! Seeded simulation of individual ballots, used to cross-check the exact
//! reliability formulas.
//!
//! Trials are split into fixed-size batches. Each batch draws from its own
//! ChaCha8 stream whose seed is a hash of `(master seed, grid point, batch)`,
//! and batches contribute integer success counts. Results are therefore
//! identical for a given configuration regardless of thread count or
//! scheduling.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::abstention::uniform_abstention_two_tier;
use crate::bounds::{hoeffding_direct_bound, hoeffding_hier_bound};
use crate::error::{Error, Result};
use crate::hetero::{hetero_direct, hetero_two_tier};
use crate::model::{
    HeteroSystem, HierarchySpec, ParametricSystem, Probability, SweepResult, SweepRow, check_grid,
    check_odd_size,
};
use crate::reliability::{binomial_tail, direct_split, multi_tier};

const BATCH: u64 = 4096;

/// A concrete system to simulate.
#[derive(Debug, Clone, PartialEq)]
pub enum SimSystem {
    /// Regular or per-layer hierarchy with homogeneous competence.
    Hierarchy {
        spec: HierarchySpec,
        epsilon: Probability,
    },
    /// Heterogeneous groups under a two-tier majority.
    Hetero(HeteroSystem),
    /// Direct majority over an odd list of voters.
    Direct(Vec<Probability>),
    /// Two tiers where every voter is correct w.p. ε, abstains w.p. α and is
    /// wrong otherwise; groups need correct votes from more than half their
    /// seats.
    UniformAbstention {
        k: u64,
        l: u64,
        epsilon: Probability,
        alpha: Probability,
    },
}

impl SimSystem {
    fn validate(&self) -> Result<()> {
        match self {
            SimSystem::Hierarchy { .. } | SimSystem::Hetero(_) => Ok(()),
            SimSystem::Direct(voters) => check_odd_size(voters.len() as u64),
            SimSystem::UniformAbstention {
                k,
                l,
                epsilon,
                alpha,
            } => {
                check_odd_size(*k)?;
                check_odd_size(*l)?;
                if alpha.value() + epsilon.value() > 1.0 + 1e-12 {
                    return Err(Error::AlphaOutOfRange {
                        alpha: alpha.value(),
                        limit: 1.0 - epsilon.value(),
                    });
                }
                Ok(())
            }
        }
    }

    fn trial(&self, rng: &mut ChaCha8Rng) -> bool {
        match self {
            SimSystem::Hierarchy { spec, epsilon } => {
                hierarchy_trial(spec.layer_sizes(), epsilon.value(), rng)
            }
            SimSystem::Hetero(system) => {
                let correct_groups = system
                    .groups()
                    .iter()
                    .filter(|g| {
                        let eps = g.competence().value();
                        let k = g.effective_size();
                        let correct = (0..k).filter(|_| rng.random::<f64>() < eps).count() as u64;
                        2 * correct > k
                    })
                    .count();
                2 * correct_groups > system.groups().len()
            }
            SimSystem::Direct(voters) => {
                let correct = voters
                    .iter()
                    .filter(|v| rng.random::<f64>() < v.value())
                    .count();
                2 * correct > voters.len()
            }
            SimSystem::UniformAbstention { k, l, epsilon, .. } => {
                // A uniform draw falls in [0, ε) for a correct vote,
                // [ε, ε + α) for an abstention and above that for a wrong
                // vote. Only correct votes count toward the seat majority.
                let eps = epsilon.value();
                let correct_groups = (0..*l)
                    .filter(|_| {
                        let correct = (0..*k).filter(|_| rng.random::<f64>() < eps).count() as u64;
                        2 * correct > *k
                    })
                    .count() as u64;
                2 * correct_groups > *l
            }
        }
    }
}

fn hierarchy_trial(layers: &[u64], eps: f64, rng: &mut ChaCha8Rng) -> bool {
    match layers.split_last() {
        None => rng.random::<f64>() < eps,
        Some((&k, below)) => {
            let correct = (0..k).filter(|_| hierarchy_trial(below, eps, rng)).count() as u64;
            2 * correct > k
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub system: SimSystem,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, system: SimSystem) -> Result<Self> {
        if trials == 0 {
            return Err(Error::ZeroTrials);
        }
        system.validate()?;
        Ok(SimConfig {
            trials,
            seed,
            system,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub p_hat: Probability,
    /// `√(p̂(1 − p̂) / trials)`
    pub stderr: f64,
    pub successes: u64,
    pub trials: u64,
    pub seed: u64,
}

impl SimEstimate {
    fn new(successes: u64, trials: u64, seed: u64) -> Self {
        let p = successes as f64 / trials as f64;
        SimEstimate {
            p_hat: Probability::from_computed(p),
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            successes,
            trials,
            seed,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream for one batch of one grid point.
pub fn stream_seed(master: u64, point: u64, batch: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ point) ^ batch)
}

fn run(config: &SimConfig, point: u64) -> SimEstimate {
    let batches = config.trials.div_ceil(BATCH);
    let successes: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, point, b));
            let len = BATCH.min(config.trials - b * BATCH);
            (0..len).filter(|_| config.system.trial(&mut rng)).count() as u64
        })
        .sum();
    SimEstimate::new(successes, config.trials, config.seed)
}

/// Fraction of simulated elections that reach the correct outcome.
pub fn simulate(config: &SimConfig) -> SimEstimate {
    run(config, 0)
}

/// An ε-indexed family of systems to sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SimFamily {
    /// Hierarchy at competence ε; exact columns compare it to direct voting
    /// over the same electorate.
    Hierarchy(HierarchySpec),
    /// Two-tier heterogeneous system; the simulation runs the hierarchy.
    HeteroHier(ParametricSystem),
    /// Same family, simulating the equivalent direct electorate.
    HeteroDirect(ParametricSystem),
    /// Uniform abstention with fixed α; the simulation runs the two tiers.
    UniformAbstention { k: u64, l: u64, alpha: Probability },
}

impl SimFamily {
    pub fn system_at(&self, epsilon: Probability) -> Result<SimSystem> {
        Ok(match self {
            SimFamily::Hierarchy(spec) => SimSystem::Hierarchy {
                spec: spec.clone(),
                epsilon,
            },
            SimFamily::HeteroHier(family) => SimSystem::Hetero(family.at(epsilon)?),
            SimFamily::HeteroDirect(family) => SimSystem::Direct(family.at(epsilon)?.voter_probs()),
            SimFamily::UniformAbstention { k, l, alpha } => SimSystem::UniformAbstention {
                k: *k,
                l: *l,
                epsilon,
                alpha: *alpha,
            },
        })
    }

    /// Exact direct/hierarchical values and, for heterogeneous families, the
    /// Hoeffding bounds.
    fn exact_row(&self, epsilon: Probability) -> Result<SweepRow> {
        let mut row = SweepRow {
            epsilon: epsilon.value(),
            ..Default::default()
        };
        match self {
            SimFamily::Hierarchy(spec) => {
                row.p_direct = direct_split(spec, epsilon).prob().value();
                row.p_hier = multi_tier(spec, epsilon).value();
            }
            SimFamily::HeteroHier(family) | SimFamily::HeteroDirect(family) => {
                let system = family.at(epsilon)?;
                let voters = system.voter_probs();
                row.p_direct = hetero_direct(&voters)?.value();
                row.p_hier = hetero_two_tier(&system).value();
                row.bound_direct = Some(hoeffding_direct_bound(&voters)?.bound.value());
                row.bound_hier = Some(hoeffding_hier_bound(&system).bound.value());
            }
            SimFamily::UniformAbstention { k, l, alpha } => {
                row.p_direct = binomial_tail(k * l, epsilon)?.value();
                row.p_hier = uniform_abstention_two_tier(*k, *l, epsilon, *alpha)?.value();
            }
        }
        row.diff = row.p_direct - row.p_hier;
        Ok(row)
    }
}

/// One simulation per grid point, each on its own derived streams, alongside
/// the exact values for the same family.
pub fn simulate_sweep(
    family: &SimFamily,
    trials: u64,
    seed: u64,
    epsilon_grid: &[Probability],
) -> Result<SweepResult> {
    check_grid(epsilon_grid.iter().map(|e| e.value()))?;
    let rows = epsilon_grid
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            let config = SimConfig::new(trials, seed, family.system_at(eps)?)?;
            let estimate = run(&config, i as u64);
            let mut row = family.exact_row(eps)?;
            row.mc_estimate = Some(estimate.p_hat.value());
            row.mc_stderr = Some(estimate.stderr);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    SweepResult::new(rows)
}
