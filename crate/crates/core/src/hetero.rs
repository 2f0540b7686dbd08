//! Exact distributions for voters with heterogeneous competence.
//!
//! The number of correct votes among independent voters with success
//! probabilities `p_i` follows a Poisson-binomial law whose generating
//! function is `∏ (q_i + p_i t) = ∏ q_i · ∏ (1 + x_i t)` with `x_i = p_i / q_i`.
//! The coefficients of the second product are the elementary symmetric
//! polynomials `C_s(x)`, so `P(Σ = s) = C_s(x) ∏ q_i`.
//!
//! Two routes to `C_s` are provided. The convolution recurrence only adds
//! nonnegative terms and is used everywhere by default. Newton's identities
//! alternate in sign and cancel catastrophically in floating point, so they
//! are evaluated exactly over big integers and kept as an independent check.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{HeteroSystem, Probability, check_odd_size};
use crate::reliability::binomial_tail;

fn check_ratios(x: &[f64]) -> Result<()> {
    match x.iter().find(|v| !v.is_finite() || **v < 0.0) {
        Some(&bad) => Err(Error::NonFiniteInput(bad)),
        None => Ok(()),
    }
}

/// `C_0 … C_n` of `x` by adding one factor `(1 + x_i t)` at a time.
pub fn elementary_symmetric_convolution(x: &[f64]) -> Result<Vec<f64>> {
    check_ratios(x)?;
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += xi * e[j - 1];
        }
    }
    Ok(e)
}

/// Splits a finite nonnegative double into `mantissa · 2^exponent`.
fn decompose(v: f64) -> (u64, i64) {
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

/// Nearest double to `value · 2^exp2`.
fn big_to_f64(value: &BigInt, exp2: i64) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    let sign = if value.is_negative() { -1.0 } else { 1.0 };
    let mag = value.magnitude();
    let bits = mag.bits() as i64;
    let shift = (bits - 64).max(0);
    let top = (mag >> shift as u64).to_u64().expect("fits in 64 bits") as f64;
    let total = (exp2 + shift).clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    sign * libm::scalbn(top, total)
}

/// `C_0 … C_n` of `x` through Newton's identities
/// `s·C_s = Σ_{k<s} (-1)^k C_{s-1-k} σ_{k+1}`, with power sums `σ_j = Σ x_i^j`.
///
/// Every double is a dyadic rational, so all inputs are rescaled to integers
/// `a_i = x_i · 2^-e` with a common exponent `e`; the identities then run
/// exactly over big integers and `C_s(x) = C_s(a) · 2^(s·e)`.
pub fn elementary_symmetric_newton(x: &[f64]) -> Result<Vec<f64>> {
    check_ratios(x)?;
    let parts: Vec<(u64, i64)> = x.iter().map(|&v| decompose(v)).collect();
    let base_exp = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    let ints: Vec<BigInt> = parts
        .iter()
        .map(|&(m, e)| BigInt::from(BigUint::from(m) << (e - base_exp) as u64))
        .collect();

    let n = x.len();
    // power_sums[j] = σ_j(a) for j = 1..=n
    let mut power_sums = vec![BigInt::zero(); n + 1];
    let mut powers: Vec<BigInt> = ints.clone();
    for j in 1..=n {
        power_sums[j] = powers.iter().sum();
        if j < n {
            for (pw, a) in powers.iter_mut().zip(&ints) {
                *pw *= a;
            }
        }
    }

    let mut c: Vec<BigInt> = Vec::with_capacity(n + 1);
    c.push(BigInt::from(1));
    for s in 1..=n {
        let mut acc = BigInt::zero();
        for k in 0..s {
            let term = &c[s - 1 - k] * &power_sums[k + 1];
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        debug_assert!((&acc % BigInt::from(s)).is_zero());
        c.push(acc / BigInt::from(s));
    }
    Ok(c.iter()
        .enumerate()
        .map(|(s, cs)| big_to_f64(cs, s as i64 * base_exp))
        .collect())
}

/// Ratios, elementary symmetric polynomials, and power sums of one input.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPolyTable {
    pub ratios: Vec<f64>,
    /// `C_0 … C_n`
    pub elementary: Vec<f64>,
    /// `σ_1 … σ_n`
    pub power_sums: Vec<f64>,
}

impl SymmetricPolyTable {
    pub fn new(ratios: Vec<f64>) -> Result<Self> {
        let elementary = elementary_symmetric_newton(&ratios)?;
        let power_sums = (1..=ratios.len() as i32)
            .map(|s| ratios.iter().map(|x| x.powi(s)).sum())
            .collect();
        Ok(SymmetricPolyTable {
            ratios,
            elementary,
            power_sums,
        })
    }

    /// Table for the odds ratios `p_i / (1 - p_i)` of a set of voters.
    pub fn from_probs(probs: &[Probability]) -> Result<Self> {
        SymmetricPolyTable::new(
            probs
                .iter()
                .map(|p| p.value() / (1.0 - p.value()))
                .collect(),
        )
    }
}

/// Distribution of the number of successes among independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonBinomial {
    success_probs: Vec<Probability>,
    pmf: Vec<f64>,
}

impl PoissonBinomial {
    pub fn success_probs(&self) -> &[Probability] {
        &self.success_probs
    }

    /// `pmf()[s] = P(Σ = s)` for `s = 0..=n`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `P(Σ >= s)`, summed from whichever side of `s` carries less mass.
    pub fn at_least(&self, s: usize) -> f64 {
        if s == 0 {
            return 1.0;
        }
        if s >= self.pmf.len() {
            return 0.0;
        }
        let upper: f64 = self.pmf[s..].iter().sum();
        let lower: f64 = self.pmf[..s].iter().sum();
        if upper <= lower { upper } else { 1.0 - lower }
    }
}

/// Exact pmf by multiplying out `∏ (q_i + p_i t)`, which equals
/// `∏ q_i · C_s(p/q)` and stays finite when some `p_i = 1`.
pub fn poisson_binomial_pmf(probs: &[Probability]) -> PoissonBinomial {
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (i, prob) in probs.iter().enumerate() {
        let (p, q) = (prob.value(), 1.0 - prob.value());
        for s in (1..=i + 1).rev() {
            pmf[s] = pmf[s] * q + pmf[s - 1] * p;
        }
        pmf[0] *= q;
    }
    PoissonBinomial {
        success_probs: probs.to_vec(),
        pmf,
    }
}

/// The pmf through the ratio form `P(Σ = s) = ∏ q_i · C_s(p/q)` with `C_s`
/// from Newton's identities. Voters with `p_i = 1` are removed and shift the
/// count by one each.
pub fn poisson_binomial_pmf_newton(probs: &[Probability]) -> Result<Vec<f64>> {
    let certain = probs.iter().filter(|p| p.value() == 1.0).count();
    let rest: Vec<f64> = probs
        .iter()
        .map(|p| p.value())
        .filter(|&p| p < 1.0)
        .collect();
    let ratios: Vec<f64> = rest.iter().map(|&p| p / (1.0 - p)).collect();
    let scale: f64 = rest.iter().map(|&p| 1.0 - p).product();
    let c = elementary_symmetric_newton(&ratios)?;
    let mut pmf = vec![0.0; probs.len() + 1];
    for (s, cs) in c.iter().enumerate() {
        pmf[s + certain] = scale * cs;
    }
    Ok(pmf)
}

/// Probability that a strict majority of an odd number of heterogeneous
/// voters is correct.
pub fn majority_prob(probs: &[Probability]) -> Result<Probability> {
    check_odd_size(probs.len() as u64)?;
    let dist = poisson_binomial_pmf(probs);
    Ok(Probability::from_computed(
        dist.at_least(probs.len() / 2 + 1),
    ))
}

/// Per-group probabilities of a correct group majority.
pub fn group_reliabilities(system: &HeteroSystem) -> Vec<Probability> {
    system
        .groups()
        .iter()
        .map(|g| {
            binomial_tail(g.effective_size(), g.competence())
                .expect("group sizes are validated odd")
        })
        .collect()
}

/// Two-tier reliability of a heterogeneous system: each group votes by
/// majority, then the groups do.
pub fn hetero_two_tier(system: &HeteroSystem) -> Probability {
    majority_prob(&group_reliabilities(system)).expect("group count is validated odd")
}

/// Direct majority over an odd list of voter competences.
pub fn hetero_direct(voter_probs: &[Probability]) -> Result<Probability> {
    majority_prob(voter_probs)
}
