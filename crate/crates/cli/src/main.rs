mod config;
mod output;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Result, bail};
use clap::{Parser, Subcommand, ValueEnum};
use hiervote::analysis::{
    CompositionReport, find_fewest_voters_layout, find_worst_layout_at, find_worst_multi_tier,
};
use hiervote::bounds::{hoeffding_direct_bound, hoeffding_hier_bound};
use hiervote::montecarlo::{SimFamily, simulate_sweep, stream_seed};
use hiervote::reliability::sweep_compare;
use hiervote::{Probability, validate_hierarchy};
use serde::Serialize;

use config::SystemConfig;
use output::{Csv, g12, json, parse_grid};

#[derive(Parser)]
#[command(
    name = "hiervote",
    version,
    about = "Reliability of direct and hierarchical majority voting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Score {
    Reliability,
    Slope,
    Fewest,
}

#[derive(Subcommand)]
enum Command {
    /// Direct and hierarchical reliability of a uniform-competence hierarchy.
    Reliability {
        /// Group sizes from the bottom layer up, e.g. 3,3,3.
        #[arg(long, value_delimiter = ',', required = true)]
        layers: Vec<u64>,
        #[arg(long, conflicts_with = "epsilon_grid")]
        epsilon: Option<f64>,
        /// start:stop:steps, both ends included.
        #[arg(long)]
        epsilon_grid: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Scores every odd factorization of an electorate and flags the minimum.
    Minimize {
        #[arg(long)]
        nd: u64,
        #[arg(long, default_value_t = 2)]
        layers_count: usize,
        #[arg(long, value_enum, default_value = "slope")]
        score: Score,
        /// Competence for the reliability score.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Exact values, bounds and simulations for a heterogeneous system.
    Hetero {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "0:1:21")]
        epsilon_grid: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Numeric checks of the ordering, square-root and fewest-voter results.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        theorem: u8,
        /// Group sizes for theorem 1.
        #[arg(long, default_value = "3,5")]
        k: String,
        /// Layer counts for theorem 1, e.g. 2..5.
        #[arg(long, default_value = "2..5")]
        n: String,
        /// Interior grid points for theorem 1.
        #[arg(long, default_value_t = 999)]
        grid: usize,
        /// Range of odd m for theorem 2; electorates are m².
        #[arg(long, default_value = "3..45")]
        nd_squares: String,
        /// Electorates for theorem 3.
        #[arg(long, default_value = "81,729,6561")]
        nd: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .is_err()
            {
                return ExitCode::FAILURE;
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(String, ExitCode)> {
    let ok = |text| Ok((text, ExitCode::SUCCESS));
    match command {
        Command::Reliability {
            layers,
            epsilon,
            epsilon_grid,
            format,
        } => ok(reliability(layers, epsilon, epsilon_grid, format)?),
        Command::Minimize {
            nd,
            layers_count,
            score,
            epsilon,
            format,
        } => ok(minimize(nd, layers_count, score, epsilon, format)?),
        Command::Hetero {
            config,
            epsilon_grid,
            trials,
            seed,
            format,
        } => ok(hetero(&config, &epsilon_grid, trials, seed, format)?),
        Command::Verify {
            theorem,
            k,
            n,
            grid,
            nd_squares,
            nd,
        } => {
            let checks = match theorem {
                1 => verify::ordering(&verify::parse_list(&k)?, verify::parse_range(&n)?, grid)?,
                2 => verify::square_roots(verify::parse_range(&nd_squares)?)?,
                _ => verify::fewest(&verify::parse_list(&nd)?)?,
            };
            let failed = checks.iter().filter(|c| !c.passed).count();
            let mut text: String = checks.iter().map(|c| c.line.clone() + "\n").collect();
            text.push_str(&format!(
                "theorem={theorem} checks={} failed={failed} result={}\n",
                checks.len(),
                if failed == 0 { "pass" } else { "fail" }
            ));
            let code = if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
            Ok((text, code))
        }
    }
}

fn reliability(
    layers: Vec<u64>,
    epsilon: Option<f64>,
    grid: Option<String>,
    format: Format,
) -> Result<String> {
    let spec = validate_hierarchy(&layers)?;
    let grid = match (epsilon, grid) {
        (Some(eps), _) => vec![Probability::new(eps)?],
        (None, Some(grid)) => parse_grid(&grid)?,
        (None, None) => bail!("give --epsilon or --epsilon-grid"),
    };
    let sweep = sweep_compare(&spec, &grid)?;

    #[derive(Serialize)]
    struct Row {
        epsilon: f64,
        p_direct: f64,
        p_hier: f64,
        diff: f64,
    }
    let rows: Vec<Row> = sweep
        .rows()
        .iter()
        .map(|r| Row {
            epsilon: r.epsilon,
            p_direct: r.p_direct,
            p_hier: r.p_hier,
            diff: r.diff,
        })
        .collect();
    match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut csv = Csv::new(&["epsilon", "p_direct", "p_hier", "diff"]);
            for r in &rows {
                csv.row(&[g12(r.epsilon), g12(r.p_direct), g12(r.p_hier), g12(r.diff)]);
            }
            Ok(csv.finish())
        }
    }
}

fn minimize(
    nd: u64,
    layers: usize,
    score: Score,
    epsilon: Option<f64>,
    format: Format,
) -> Result<String> {
    let report: CompositionReport = match score {
        Score::Reliability => {
            let Some(eps) = epsilon else {
                bail!("--score reliability needs --epsilon");
            };
            find_worst_layout_at(nd, layers, Probability::new(eps)?)?
        }
        Score::Slope | Score::Fewest if epsilon.is_some() => {
            bail!("--epsilon only applies to --score reliability")
        }
        Score::Slope => find_worst_multi_tier(nd, layers)?,
        Score::Fewest => find_fewest_voters_layout(nd, layers)?,
    };

    #[derive(Serialize)]
    struct Entry<'a> {
        layers: &'a [u64],
        score: f64,
        argmin: bool,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        nd: u64,
        layers_count: usize,
        score: &'static str,
        epsilon: Option<f64>,
        candidates: Vec<Entry<'a>>,
        argmin: &'a [u64],
        argmin_score: f64,
        tie: bool,
    }
    let out = Report {
        nd,
        layers_count: layers,
        score: report.score_kind.as_str(),
        epsilon: report.epsilon,
        candidates: report
            .candidates
            .iter()
            .map(|c| Entry {
                layers: &c.layers,
                score: c.score,
                argmin: c.layers == report.argmin,
            })
            .collect(),
        argmin: &report.argmin,
        argmin_score: report.argmin_score,
        tie: report.tie,
    };
    if report.tie {
        eprintln!("note: several compositions score within 1e-12 of the minimum");
    }
    match format {
        Format::Json => json(&out),
        Format::Csv => {
            let mut csv = Csv::new(&["layers", "score", "argmin"]);
            for e in &out.candidates {
                csv.row(&[verify::join(e.layers), g12(e.score), e.argmin.to_string()]);
            }
            Ok(csv.finish())
        }
    }
}

fn hetero(
    path: &std::path::Path,
    grid: &str,
    trials: u64,
    seed: u64,
    format: Format,
) -> Result<String> {
    let family = SystemConfig::load(path)?.to_system()?;
    let grid = parse_grid(grid)?;
    eprintln!(
        "hetero: {} groups, {} grid points, {trials} trials per point, seed {seed}",
        family.groups().len(),
        grid.len()
    );
    let hier = simulate_sweep(&SimFamily::HeteroHier(family.clone()), trials, seed, &grid)?;
    // Separate streams so the two estimates at a point are independent.
    let direct_seed = stream_seed(seed, u64::MAX, 0);
    let direct = simulate_sweep(
        &SimFamily::HeteroDirect(family.clone()),
        trials,
        direct_seed,
        &grid,
    )?;

    #[derive(Serialize)]
    struct Row {
        epsilon: f64,
        p_hier_exact: f64,
        p_direct_exact: f64,
        bound_hier: f64,
        bound_hier_valid: bool,
        bound_direct: f64,
        bound_direct_valid: bool,
        mc_hier: f64,
        mc_hier_stderr: f64,
        mc_direct: f64,
        mc_direct_stderr: f64,
    }
    let mut rows = Vec::with_capacity(grid.len());
    for ((&eps, h), d) in grid.iter().zip(hier.rows()).zip(direct.rows()) {
        let system = family.at(eps)?;
        let bh = hoeffding_hier_bound(&system);
        let bd = hoeffding_direct_bound(&system.voter_probs())?;
        rows.push(Row {
            epsilon: eps.value(),
            p_hier_exact: h.p_hier,
            p_direct_exact: h.p_direct,
            bound_hier: bh.bound.value(),
            bound_hier_valid: bh.valid,
            bound_direct: bd.bound.value(),
            bound_direct_valid: bd.valid,
            mc_hier: h.mc_estimate.expect("simulated"),
            mc_hier_stderr: h.mc_stderr.expect("simulated"),
            mc_direct: d.mc_estimate.expect("simulated"),
            mc_direct_stderr: d.mc_stderr.expect("simulated"),
        });
    }
    match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "epsilon",
                "p_hier_exact",
                "p_direct_exact",
                "bound_hier",
                "bound_hier_valid",
                "bound_direct",
                "bound_direct_valid",
                "mc_hier",
                "mc_hier_stderr",
                "mc_direct",
                "mc_direct_stderr",
            ]);
            for r in &rows {
                csv.row(&[
                    g12(r.epsilon),
                    g12(r.p_hier_exact),
                    g12(r.p_direct_exact),
                    g12(r.bound_hier),
                    r.bound_hier_valid.to_string(),
                    g12(r.bound_direct),
                    r.bound_direct_valid.to_string(),
                    g12(r.mc_hier),
                    g12(r.mc_hier_stderr),
                    g12(r.mc_direct),
                    g12(r.mc_direct_stderr),
                ]);
            }
            Ok(csv.finish())
        }
    }
}
