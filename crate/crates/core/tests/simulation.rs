use hiervote::abstention::uniform_abstention_two_tier;
use hiervote::hetero::{hetero_direct, hetero_two_tier};
use hiervote::montecarlo::{SimConfig, SimFamily, SimSystem, simulate, simulate_sweep};
use hiervote::reliability::multi_tier;
use hiervote::{
    CompetenceRule, GroupProfile, HeteroSystem, HierarchySpec, ParametricGroup, ParametricSystem,
    Probability,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(x: f64) -> Probability {
    Probability::new(x).unwrap()
}

/// A fixed panel of systems paired with their exact reliabilities.
fn panel() -> Vec<(SimSystem, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    let odd = |rng: &mut ChaCha8Rng, lo: u64, hi: u64| 2 * rng.random_range(lo..=hi) + 1;
    for _ in 0..30 {
        let layers: Vec<u64> = (0..rng.random_range(1..=3))
            .map(|_| odd(&mut rng, 1, 3))
            .collect();
        let spec = HierarchySpec::new(layers).unwrap();
        let eps = p(rng.random_range(0.3..0.8));
        let exact = multi_tier(&spec, eps).value();
        out.push((SimSystem::Hierarchy { spec, epsilon: eps }, exact));
    }
    for _ in 0..25 {
        let (k, l) = (odd(&mut rng, 1, 4), odd(&mut rng, 1, 3));
        let eps = rng.random_range(0.3..0.8);
        let alpha = p(rng.random_range(0.0..(1.0 - eps)));
        let eps = p(eps);
        let Ok(exact) = uniform_abstention_two_tier(k, l, eps, alpha) else {
            continue;
        };
        out.push((
            SimSystem::UniformAbstention {
                k,
                l,
                epsilon: eps,
                alpha,
            },
            exact.value(),
        ));
    }
    for _ in 0..25 {
        let groups: Vec<GroupProfile> = (0..odd(&mut rng, 0, 2))
            .map(|_| {
                let k = odd(&mut rng, 1, 3);
                GroupProfile::new(k, p(rng.random_range(0.1..0.95)), Probability::ZERO).unwrap()
            })
            .collect();
        let system = HeteroSystem::new(groups).unwrap();
        let exact = hetero_two_tier(&system).value();
        out.push((SimSystem::Hetero(system.clone()), exact));
        let voters = system.voter_probs();
        let exact = hetero_direct(&voters).unwrap().value();
        out.push((SimSystem::Direct(voters), exact));
    }
    out
}

#[test]
fn simulation_agrees_with_exact_values() {
    let panel = panel();
    assert!(panel.len() >= 50);
    let mut misses = Vec::new();
    for (i, (system, exact)) in panel.iter().enumerate() {
        let config = SimConfig::new(100_000, 1000 + i as u64, system.clone()).unwrap();
        let est = simulate(&config);
        if (est.p_hat.value() - exact).abs() > 4.0 * est.stderr {
            misses.push((i, est.p_hat.value(), *exact));
        }
    }
    let allowed = panel.len() / 100;
    assert!(
        misses.len() <= allowed,
        "{} of {} outside 4σ: {misses:?}",
        misses.len(),
        panel.len()
    );
}

fn three_group_family() -> ParametricSystem {
    let g = |size, rule| ParametricGroup {
        effective_size: size,
        rule,
        abstention: p(0.4),
    };
    ParametricSystem::new(vec![
        g(3, CompetenceRule::Eps),
        g(3, CompetenceRule::Eps),
        ParametricGroup {
            abstention: Probability::ZERO,
            ..g(5, CompetenceRule::OneMinusEps)
        },
    ])
    .unwrap()
}

#[test]
fn sweep_within_four_sigma() {
    let grid: Vec<Probability> = (0..=20).map(|i| p(i as f64 / 20.0)).collect();
    for family in [
        SimFamily::HeteroHier(three_group_family()),
        SimFamily::HeteroDirect(three_group_family()),
    ] {
        let sweep = simulate_sweep(&family, 10_000, 5, &grid).unwrap();
        for row in sweep.rows() {
            let exact = match family {
                SimFamily::HeteroHier(_) => row.p_hier,
                _ => row.p_direct,
            };
            let (est, se) = (row.mc_estimate.unwrap(), row.mc_stderr.unwrap());
            assert!(
                (est - exact).abs() <= 4.0 * se + 1e-12,
                "eps={}: {est} vs {exact}",
                row.epsilon
            );
        }
    }
}

#[test]
fn sweep_gap_peaks_near_point_nine() {
    let grid: Vec<Probability> = (0..=20).map(|i| p(i as f64 / 20.0)).collect();
    let hier = simulate_sweep(
        &SimFamily::HeteroHier(three_group_family()),
        100_000,
        9,
        &grid,
    )
    .unwrap();
    let direct = simulate_sweep(
        &SimFamily::HeteroDirect(three_group_family()),
        100_000,
        10,
        &grid,
    )
    .unwrap();
    let (eps, _) = hier
        .rows()
        .iter()
        .zip(direct.rows())
        .map(|(h, d)| (h.epsilon, h.mc_estimate.unwrap() - d.mc_estimate.unwrap()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((eps - 0.9).abs() <= 0.05 + 1e-12, "peak at {eps}");
}

#[test]
fn sweep_is_reproducible() {
    let grid = [p(0.3), p(0.6), p(0.9)];
    let family = SimFamily::Hierarchy(HierarchySpec::new(vec![3, 5]).unwrap());
    let a = simulate_sweep(&family, 5_000, 77, &grid).unwrap();
    let b = simulate_sweep(&family, 5_000, 77, &grid).unwrap();
    assert_eq!(a, b);
}
