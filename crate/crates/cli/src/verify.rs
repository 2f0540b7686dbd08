//! Numeric checks of the structural results, one `key=value` line per check.

use anyhow::{Context, Result, bail};
use hiervote::analysis::{
    fewest_voters, find_fewest_voters_layout, find_worst_multi_tier, theorem1_verify,
};

use crate::output::g12;

pub struct Check {
    pub line: String,
    pub passed: bool,
}

fn verdict(passed: bool) -> &'static str {
    if passed { "pass" } else { "fail" }
}

/// Parses `a..b` (inclusive) or a single number.
pub fn parse_range(text: &str) -> Result<(u64, u64)> {
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .with_context(|| format!("bad range bound `{s}`"))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if lo > hi {
        bail!("empty range `{text}`");
    }
    Ok((lo, hi))
}

pub fn parse_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .with_context(|| format!("bad integer `{s}`"))
        })
        .collect()
}

/// Direct voting beats an `n`-level tree of `k`-groups above 0.5 and loses
/// below it, with ties at the fixed points.
pub fn ordering(ks: &[u64], (lo, hi): (u64, u64), grid: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &k in ks {
        for n in lo..=hi {
            let n = u32::try_from(n).context("layer count too large")?;
            let r = theorem1_verify(k, n, grid)?;
            checks.push(Check {
                line: format!(
                    "theorem=1 k={k} n={n} grid={grid} fixed_point_max_diff={} violations={} max_violation={} slope_direct={} slope_hier={} result={}",
                    g12(r.fixed_point_max_diff),
                    r.violations,
                    g12(r.max_violation),
                    g12(r.slope_direct),
                    g12(r.slope_hier),
                    verdict(r.passed()),
                ),
                passed: r.passed(),
            });
        }
    }
    Ok(checks)
}

/// Among two-layer splits of `m²`, the flattest at 0.5 is `(m, m)`.
pub fn square_roots((lo, hi): (u64, u64)) -> Result<Vec<Check>> {
    let start = lo.max(3) | 1;
    let mut checks = Vec::new();
    for m in (start..=hi).step_by(2) {
        let nd = m.checked_mul(m).context("square too large")?;
        let r = find_worst_multi_tier(nd, 2)?;
        let passed = r.argmin == [m, m];
        checks.push(Check {
            line: format!(
                "theorem=2 nd={nd} expected={m}x{m} argmin={} score={} tie={} result={}",
                join(&r.argmin),
                g12(r.argmin_score),
                r.tie,
                verdict(passed),
            ),
            passed,
        });
    }
    if checks.is_empty() {
        bail!("no odd m >= 3 in {lo}..{hi}");
    }
    Ok(checks)
}

/// For every way to write `nd` as `m^n` with odd `m >= 3` and `n >= 2`, the
/// equal layout lets the fewest voters decide.
pub fn fewest(electorates: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &nd in electorates {
        let powers = odd_perfect_powers(nd);
        if powers.is_empty() {
            bail!("{nd} is not m^n for any odd m >= 3 and n >= 2");
        }
        for (m, n) in powers {
            let expected = vec![m; n];
            let want = fewest_voters(&expected)?;
            let r = find_fewest_voters_layout(nd, n)?;
            let passed = r.argmin == expected && r.argmin_score == want as f64;
            checks.push(Check {
                line: format!(
                    "theorem=3 nd={nd} n={n} expected={} argmin={} fewest={} expected_fewest={want} result={}",
                    join(&expected),
                    join(&r.argmin),
                    r.argmin_score,
                    verdict(passed),
                ),
                passed,
            });
        }
    }
    Ok(checks)
}

fn odd_perfect_powers(nd: u64) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    let mut m = 3u64;
    while m.checked_mul(m).is_some_and(|sq| sq <= nd) {
        let mut power = m;
        let mut n = 1;
        while power < nd {
            match power.checked_mul(m) {
                Some(p) => power = p,
                None => break,
            }
            n += 1;
        }
        if power == nd {
            out.push((m, n));
        }
        m += 2;
    }
    out.sort_by_key(|&(_, n)| n);
    out
}

pub fn join(layers: &[u64]) -> String {
    layers
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join("x")
}
