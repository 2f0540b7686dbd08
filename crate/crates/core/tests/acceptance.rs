//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p hiervote --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hiervote::abstention::uniform_abstention_tier;
use hiervote::analysis::{
    direct_slope_at_half, fewest_voters, find_fewest_voters_layout, find_worst_multi_tier,
    find_worst_two_tier, hier_slope_at_half, theorem1_verify,
};
use hiervote::bounds::{hoeffding_direct_bound, hoeffding_hier_bound};
use hiervote::hetero::{
    elementary_symmetric_convolution, elementary_symmetric_newton, hetero_direct, hetero_two_tier,
    poisson_binomial_pmf,
};
use hiervote::montecarlo::{SimFamily, simulate_sweep};
use hiervote::reliability::binomial_tail;
use hiervote::{CompetenceRule, ParametricGroup, ParametricSystem, Probability};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(x: f64) -> Probability {
    Probability::new(x).unwrap()
}

/// Three groups of effective sizes 3, 3, 5 at competences ε, ε, 1 − ε.
fn three_group_family() -> ParametricSystem {
    let group = |size, rule, alpha| ParametricGroup {
        effective_size: size,
        rule,
        abstention: p(alpha),
    };
    ParametricSystem::new(vec![
        group(3, CompetenceRule::Eps, 0.4),
        group(3, CompetenceRule::Eps, 0.4),
        group(5, CompetenceRule::OneMinusEps, 0.0),
    ])
    .unwrap()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed >= limit {
            out.passed = false;
        }
        out.detail = format!(
            "{}; {:.2}s (limit {}s)",
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    out
}

fn theorem1_sweep() -> Outcome {
    let mut worst_fixed: f64 = 0.0;
    let mut violations = 0;
    for k in [3u64, 5] {
        for n in 2..=5u32 {
            let r = theorem1_verify(k, n, 999).unwrap();
            worst_fixed = worst_fixed.max(r.fixed_point_max_diff);
            violations += r.violations;
        }
    }
    outcome(
        worst_fixed <= 1e-12 && violations == 0,
        format!("max |p_d - p_n| at fixed points {worst_fixed:.1e}, sign violations {violations}"),
    )
}

fn worst_two_tier_splits() -> Outcome {
    let eps = p(0.5001);
    let got: Vec<(u64, u64)> = [1125u64, 2025, 3375]
        .iter()
        .map(|&nd| (nd, find_worst_two_tier(nd, eps).unwrap().argmin_top()))
        .collect();
    let expected = [(1125, 25), (2025, 45), (3375, 45)];
    outcome(got == expected, format!("l_min {got:?}"))
}

fn square_electorates() -> Outcome {
    let wrong: Vec<(u64, Vec<u64>)> = (3..=45u64)
        .step_by(2)
        .filter_map(|m| {
            let r = find_worst_multi_tier(m * m, 2).unwrap();
            (r.argmin != [m, m]).then_some((m, r.argmin))
        })
        .collect();
    outcome(
        wrong.is_empty(),
        format!("22 square electorates, mismatches {wrong:?}"),
    )
}

fn fewest_voter_layouts() -> Outcome {
    let counts = [
        fewest_voters(&[81]).unwrap(),
        fewest_voters(&[27, 3]).unwrap(),
        fewest_voters(&[9, 9]).unwrap(),
    ];
    let layouts = [
        find_fewest_voters_layout(729, 3).unwrap().argmin,
        find_fewest_voters_layout(6561, 4).unwrap().argmin,
        find_fewest_voters_layout(2_313_441, 4).unwrap().argmin,
    ];
    let passed = counts == [41, 28, 25]
        && layouts[0] == [9, 9, 9]
        && layouts[1] == [9, 9, 9, 9]
        && layouts[2] == [39, 39, 39, 39];
    outcome(passed, format!("fewest {counts:?}, layouts {layouts:?}"))
}

fn three_group_bounds() -> Outcome {
    let system = three_group_family().at(Probability::ONE).unwrap();
    let hier = hoeffding_hier_bound(&system);
    let direct = hoeffding_direct_bound(&system.voter_probs()).unwrap();
    let expected_direct = binomial_tail(11, p(6.0 / 11.0)).unwrap().value();
    let passed = (hier.bound.value() - 20.0 / 27.0).abs() <= 1e-10
        && (direct.bound.value() - expected_direct).abs() <= 1e-12
        && (direct.bound.value() - 0.62).abs() <= 0.01;
    outcome(
        passed,
        format!(
            "hier bound {:.10} (20/27 = {:.10}), direct bound {:.6}",
            hier.bound.value(),
            20.0 / 27.0,
            direct.bound.value()
        ),
    )
}

fn three_group_crossover() -> Outcome {
    let family = three_group_family();
    let mut below = Vec::new();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=100 {
        let eps = p(i as f64 / 100.0);
        let system = family.at(eps).unwrap();
        let hier = hetero_two_tier(&system).value();
        let direct = hetero_direct(&system.voter_probs()).unwrap().value();
        let gap = hier - direct;
        // Both are exactly 1/2 at ε = 1/2 up to rounding.
        if eps.value() >= 0.5 && gap < -1e-12 {
            below.push(eps.value());
        }
        if gap > best.0 {
            best = (gap, eps.value());
        }
    }
    outcome(
        below.is_empty() && (best.1 - 0.9).abs() <= 0.05,
        format!(
            "max gap {:.4} at eps {:.2}, points with hier < direct above 0.5: {below:?}",
            best.0, best.1
        ),
    )
}

fn monte_carlo() -> Outcome {
    let grid: Vec<Probability> = (0..=20).map(|i| p(i as f64 / 20.0)).collect();
    let mut worst_z: f64 = 0.0;
    let mut misses = 0;
    for (family, seed) in [
        (SimFamily::HeteroHier(three_group_family()), 42),
        (SimFamily::HeteroDirect(three_group_family()), 43),
    ] {
        let sweep = simulate_sweep(&family, 300_000, seed, &grid).unwrap();
        for row in sweep.rows() {
            let exact = match family {
                SimFamily::HeteroHier(_) => row.p_hier,
                _ => row.p_direct,
            };
            let (est, se) = (row.mc_estimate.unwrap(), row.mc_stderr.unwrap());
            let dev = (est - exact).abs();
            if dev > 4.0 * se {
                misses += 1;
            }
            if se > 0.0 {
                worst_z = worst_z.max(dev / se);
            }
        }
    }
    outcome(
        misses == 0,
        format!("42 points, outside 4σ {misses}, max |z| {worst_z:.2}"),
    )
}

fn slope_ordering() -> Outcome {
    let mut failures = Vec::new();
    for k in [3u64, 5] {
        let one = (direct_slope_at_half(k).unwrap() - hier_slope_at_half(k, 1).unwrap()).abs();
        if one > 1e-12 {
            failures.push((k, 1));
        }
        for n in 2..=7u32 {
            let direct = direct_slope_at_half(k.pow(n)).unwrap();
            let hier = hier_slope_at_half(k, n).unwrap();
            if !(direct > hier) {
                failures.push((k, n));
            }
        }
    }
    let top = (
        direct_slope_at_half(5u64.pow(7)).unwrap(),
        hier_slope_at_half(5, 7).unwrap(),
    );
    outcome(
        failures.is_empty(),
        format!(
            "failures {failures:?}; k=5 n=7: direct {:.3} vs hier {:.3}",
            top.0, top.1
        ),
    )
}

fn poisson_binomial() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cases = 1000;
    let (mut norm_err, mut newton_err, mut enum_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..cases {
        let n = rng.random_range(0..=200);
        let probs: Vec<Probability> = (0..n).map(|_| p(rng.random_range(0.0..=1.0))).collect();
        let total: f64 = poisson_binomial_pmf(&probs).pmf().iter().sum();
        norm_err = norm_err.max((total - 1.0).abs());

        let n = rng.random_range(0..=30);
        let x: Vec<f64> = (0..n)
            .map(|_| {
                let q: f64 = rng.random_range(0.01..=0.99);
                q / (1.0 - q)
            })
            .collect();
        let a = elementary_symmetric_newton(&x).unwrap();
        let b = elementary_symmetric_convolution(&x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            newton_err = newton_err.max((u - v).abs() / v.abs());
        }

        let n = rng.random_range(0..=15usize);
        let ps: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let mut exact = vec![0.0; n + 1];
        for pattern in 0u32..(1 << n) {
            let w: f64 = ps
                .iter()
                .enumerate()
                .map(|(i, &pi)| if pattern >> i & 1 == 1 { pi } else { 1.0 - pi })
                .product();
            exact[pattern.count_ones() as usize] += w;
        }
        let got = poisson_binomial_pmf(&ps.iter().map(|&v| p(v)).collect::<Vec<_>>());
        for (u, v) in got.pmf().iter().zip(&exact) {
            enum_err = enum_err.max((u - v).abs());
        }
    }
    outcome(
        norm_err <= 1e-12 && newton_err <= 1e-10 && enum_err <= 1e-12,
        format!(
            "{cases} cases each: normalization {norm_err:.1e}, newton rel {newton_err:.1e}, enumeration {enum_err:.1e}"
        ),
    )
}

fn abstention() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let k = 2 * rng.random_range(0..=10u64) + 1;
        let eps: f64 = rng.random_range(0.0..=1.0);
        let alpha = rng.random_range(0.0..=1.0) * (1.0 - eps);
        let a = uniform_abstention_tier(k, p(eps), p(alpha))
            .unwrap()
            .value();
        let b = binomial_tail(k, p(eps)).unwrap().value();
        worst = worst.max((a - b).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("1000 cases, k <= 21, max deviation {worst:.1e}"),
    )
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        (
            "1 direct vs hierarchical ordering, k in {3,5}, n in 2..=5",
            Box::new(move || timed(secs(5), theorem1_sweep)),
        ),
        (
            "2 worst two-tier split at eps = 0.5001",
            Box::new(move || timed(secs(10), worst_two_tier_splits)),
        ),
        (
            "3 square electorates minimized at (m, m)",
            Box::new(move || timed(None, square_electorates)),
        ),
        (
            "4 fewest decisive voters",
            Box::new(move || timed(None, fewest_voter_layouts)),
        ),
        (
            "5 Hoeffding bounds at eps = 1",
            Box::new(move || timed(None, three_group_bounds)),
        ),
        (
            "6 heterogeneous crossover",
            Box::new(move || timed(secs(5), three_group_crossover)),
        ),
        (
            "7 Monte Carlo within 4 sigma",
            Box::new(move || timed(secs(60), monte_carlo)),
        ),
        (
            "8 slope ordering at eps = 0.5",
            Box::new(move || timed(None, slope_ordering)),
        ),
        (
            "9 Poisson-binomial engine",
            Box::new(move || timed(secs(30), poisson_binomial)),
        ),
        (
            "10 abstention marginalization",
            Box::new(move || timed(None, abstention)),
        ),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let out = run();
        if !out.passed {
            failed += 1;
        }
        println!(
            "[{}] {name}: {}",
            if out.passed { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
