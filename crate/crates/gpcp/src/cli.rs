//! Command-line driver: `solve`, `residual`, `classify`, `errorbound`, and
//! `demo` subcommands.
//!
//! Exit codes: 0 success, 1 solver failure (no solution found or a demo
//! check failed), 2 usage error, 3 unreadable or invalid problem input.
//! `GPCP_SEED` overrides the default seed; an explicit `--seed` flag wins
//! over the environment.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{self, SearchBudget};
use crate::error::GpcpError;
use crate::errorbound::{self, GrowthProbeResult, GrowthVariant, ProbeOutcome, RatioSample};
use crate::fixtures;
use crate::io;
use crate::problem::SolutionSetEstimate;
use crate::solver::{
    homotopy_solve, multistart_solve, newton_minmap, SampleBox, SolveConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER_FAILURE: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 3;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "gpcp",
    version,
    about = "Polynomial complementarity instances: solve, classify, and probe error bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance by deterministic multistart semismooth Newton.
    Solve {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of start points.
        #[arg(long)]
        starts: Option<usize>,
        /// Residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Start box as "lo,hi" applied to every coordinate; defaults to a
        /// box scaled by the constant terms.
        #[arg(long, value_name = "LO,HI")]
        r#box: Option<String>,
    },
    /// Print the natural residual at a point.
    Residual {
        #[arg(long)]
        file: PathBuf,
        /// Comma-separated coordinates, e.g. --at 1,2.
        #[arg(long)]
        at: String,
    },
    /// Run a structured-pair or definiteness query by counterexample search.
    Classify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum)]
        query: QueryArg,
        /// Search starts (or samples for the s-map query).
        #[arg(long)]
        budget: Option<usize>,
        /// Iterations per start.
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Multistart solve, then scan the error-bound ratios and run the
    /// growth, solution-rate, and ray probes; emits a JSON report.
    Errorbound {
        #[arg(long)]
        file: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        starts: Option<usize>,
        /// Random ray directions for the asymptotic probe.
        #[arg(long)]
        directions: Option<usize>,
        /// Random point pairs for the growth probe.
        #[arg(long)]
        pair_budget: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the bundled fixtures end to end and print a pass/fail table.
    Demo {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QueryArg {
    ErPair,
    R0Pair,
    Pd,
    Copositive,
    Smap,
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports usage errors with exit code 2 and help/version
            // requests with 0
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };

    let result = match cli.command {
        Command::Solve { file, seed, starts, tol, r#box } => {
            cmd_solve(&file, seed, starts, tol, r#box.as_deref())
        }
        Command::Residual { file, at } => cmd_residual(&file, &at),
        Command::Classify { file, query, budget, iters, seed } => {
            cmd_classify(&file, query, budget, iters, seed)
        }
        Command::Errorbound { file, out, samples, starts, directions, pair_budget, seed } => {
            cmd_errorbound(
                &file,
                out.as_deref(),
                samples,
                starts,
                directions,
                pair_budget,
                seed,
            )
        }
        Command::Demo { seed } => cmd_demo(seed),
    };

    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                GpcpError::Parse(_)
                | GpcpError::Validation(_)
                | GpcpError::Io(_)
                | GpcpError::Dimension { .. }
                | GpcpError::NonFinite { .. }
                | GpcpError::UnsupportedCone
                | GpcpError::ProjectionUnsupported
                | GpcpError::OddOrder { .. }
                | GpcpError::NotASolution { .. } => EXIT_BAD_INPUT,
                GpcpError::EmptySolutionEstimate => EXIT_SOLVER_FAILURE,
            }
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("GPCP_SEED").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_SEED)
}

fn parse_coords(text: &str) -> Result<Vec<f64>, GpcpError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| GpcpError::Validation(format!("cannot parse coordinate {tok:?}")))
        })
        .collect()
}

fn parse_box(text: &str, n: usize) -> Result<SampleBox, GpcpError> {
    let vals = parse_coords(text)?;
    if vals.len() != 2 {
        return Err(GpcpError::Validation(format!(
            "--box expects \"lo,hi\", got {text:?}"
        )));
    }
    SampleBox::cube(n, vals[0], vals[1])
}

fn format_point(x: &[f64]) -> String {
    let coords: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", coords.join(", "))
}

fn cmd_solve(
    file: &std::path::Path,
    seed: Option<u64>,
    starts: Option<usize>,
    tol: Option<f64>,
    box_arg: Option<&str>,
) -> Result<i32, GpcpError> {
    let p = io::load_problem(file)?;
    let mut cfg = SolveConfig { seed: resolve_seed(seed), ..SolveConfig::default() };
    if let Some(s) = starts {
        cfg.starts = s;
    }
    if let Some(t) = tol {
        cfg.tol = t;
    }
    let sample_box = match box_arg {
        Some(text) => parse_box(text, p.dim())?,
        None => SampleBox::default_for(&p),
    };
    let est = multistart_solve(&p, &cfg, &sample_box)?;
    if est.is_empty() {
        println!("no solutions found ({} starts, seed {})", cfg.starts, cfg.seed);
        return Ok(EXIT_SOLVER_FAILURE);
    }
    println!("{} solution(s) found ({} starts, seed {}):", est.len(), cfg.starts, cfg.seed);
    for (x, r) in est.points().iter().zip(est.residuals()) {
        println!("  {}   residual {r:.3e}", format_point(x));
    }
    Ok(EXIT_OK)
}

fn cmd_residual(file: &std::path::Path, at: &str) -> Result<i32, GpcpError> {
    let p = io::load_problem(file)?;
    let x = parse_coords(at)?;
    let r = p.natural_residual(&x)?;
    println!("r{} = {r:.12e}", format_point(&x));
    Ok(EXIT_OK)
}

fn cmd_classify(
    file: &std::path::Path,
    query: QueryArg,
    budget: Option<usize>,
    iters: Option<usize>,
    seed: Option<u64>,
) -> Result<i32, GpcpError> {
    let p = io::load_problem(file)?;
    let seed = resolve_seed(seed);
    let mut search = SearchBudget::default();
    if let Some(b) = budget {
        search.starts = b;
    }
    if let Some(i) = iters {
        search.iters_per_start = i;
    }

    let verdict = match query {
        QueryArg::ErPair => classify::find_er_counterexample(
            p.f().leading_tensor(),
            p.g().leading_tensor(),
            p.cone(),
            search,
            seed,
        )?,
        QueryArg::R0Pair => classify::find_r0_counterexample(
            p.f().leading_tensor(),
            p.g().leading_tensor(),
            p.cone(),
            search,
            seed,
        )?,
        QueryArg::Pd => classify::check_positive_definite(p.f().leading_tensor(), search, seed)?,
        QueryArg::Copositive => {
            classify::check_strictly_copositive(p.f().leading_tensor(), search, seed)?
        }
        QueryArg::Smap => classify::check_s_map_invariance(&p, search.starts, seed)?,
    };
    println!("{verdict}");
    Ok(EXIT_OK)
}

/// Condensed scan statistics for the report; the worst sample stands in for
/// the full ratio list.
#[derive(Serialize)]
struct ScanSummary {
    sample_count: usize,
    retained_ratios: usize,
    c_estimate: f64,
    tau_fit: Option<f64>,
    worst_sample: Option<RatioSample>,
}

#[derive(Serialize)]
struct RatePoint {
    point: Vec<f64>,
    result: errorbound::RateProbeResult,
}

#[derive(Serialize)]
struct ErrorBoundResults {
    solution_estimate: SolutionSetEstimate,
    /// Distances are measured against the computed estimate; solutions it
    /// misses can only inflate the constant.
    solution_estimate_caveat: String,
    error_bound: ScanSummary,
    pairwise_growth_max: GrowthProbeResult,
    pairwise_growth_inner: GrowthProbeResult,
    solution_rate: Vec<RatePoint>,
    ray_growth: errorbound::RayProbeResult,
}

#[derive(Serialize)]
struct Report<R: Serialize> {
    problem: String,
    command: String,
    config: serde_json::Value,
    results: R,
}

#[allow(clippy::too_many_arguments)]
fn cmd_errorbound(
    file: &std::path::Path,
    out: Option<&std::path::Path>,
    samples: Option<usize>,
    starts: Option<usize>,
    directions: Option<usize>,
    pair_budget: Option<usize>,
    seed: Option<u64>,
) -> Result<i32, GpcpError> {
    let p = io::load_problem(file)?;
    let seed = resolve_seed(seed);
    let samples = samples.unwrap_or(10_000);
    let n_directions = directions.unwrap_or(16);
    let pair_budget = pair_budget.unwrap_or(200);
    let mut cfg = SolveConfig { seed, ..SolveConfig::default() };
    if let Some(s) = starts {
        cfg.starts = s;
    }

    let sample_box = SampleBox::default_for(&p);
    let est = multistart_solve(&p, &cfg, &sample_box)?;
    if est.is_empty() {
        eprintln!("no solutions found; cannot scan error-bound ratios");
        return Ok(EXIT_SOLVER_FAILURE);
    }

    let scan = errorbound::error_bound_scan(&p, &est, &sample_box, samples, seed)?;
    let worst_sample = scan
        .ratios
        .iter()
        .max_by(|a, b| a.ratio.partial_cmp(&b.ratio).expect("finite ratios"))
        .cloned();
    let rho_grid = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];
    let growth_max = errorbound::falsify_pairwise_growth(
        &p,
        GrowthVariant::MaxProduct,
        &rho_grid,
        pair_budget,
        seed,
    )?;
    let growth_inner = errorbound::falsify_pairwise_growth(
        &p,
        GrowthVariant::InnerProduct,
        &rho_grid,
        pair_budget,
        seed,
    )?;

    // axis directions both ways, then seeded extras
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..p.dim() {
        let mut e = vec![0.0; p.dim()];
        e[i] = 1.0;
        dirs.push(e.clone());
        e[i] = -1.0;
        dirs.push(e);
    }
    dirs.extend(errorbound::random_unit_directions(p.dim(), n_directions, seed));

    let radii = errorbound::default_radii();
    let mut solution_rate = Vec::new();
    for point in est.points() {
        solution_rate.push(RatePoint {
            point: point.clone(),
            result: errorbound::probe_solution_rate(&p, point, &dirs, &radii)?,
        });
    }

    let ray_dirs = errorbound::random_unit_directions(p.dim(), n_directions, seed ^ 0x5f5f);
    let ray_growth = errorbound::probe_ray_growth(&p, &ray_dirs, &errorbound::default_scales())?;

    let report = Report {
        problem: p.name().unwrap_or("unnamed").to_owned(),
        command: "errorbound".to_owned(),
        config: serde_json::json!({
            "seed": seed,
            "budgets": {
                "starts": cfg.starts,
                "samples": samples,
                "pair_budget": pair_budget,
                "directions": n_directions,
            },
            "tolerances": {
                "solve_tol": cfg.tol,
                "dedupe_radius": est.dedupe_radius(),
                "residual_guard": errorbound::RESIDUAL_GUARD,
                "premise_tol": errorbound::PREMISE_TOL,
                "nonzero_limit_floor": errorbound::NONZERO_LIMIT_FLOOR,
            },
        }),
        results: ErrorBoundResults {
            solution_estimate: est,
            solution_estimate_caveat:
                "distances use the computed estimate; missed solutions inflate c_estimate"
                    .to_owned(),
            error_bound: ScanSummary {
                sample_count: scan.sample_count,
                retained_ratios: scan.ratios.len(),
                c_estimate: scan.c_estimate,
                tau_fit: scan.tau_fit,
                worst_sample,
            },
            pairwise_growth_max: growth_max,
            pairwise_growth_inner: growth_inner,
            solution_rate,
            ray_growth,
        },
    };

    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| GpcpError::Validation(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

struct DemoCheck {
    name: &'static str,
    pass: bool,
    note: String,
}

fn close(x: &[f64], want: &[f64], tol: f64) -> bool {
    x.len() == want.len() && x.iter().zip(want).all(|(a, b)| (a - b).abs() <= tol)
}

fn cmd_demo(seed: Option<u64>) -> Result<i32, GpcpError> {
    let seed = resolve_seed(seed);
    let mut checks: Vec<DemoCheck> = Vec::new();
    let mut record = |name: &'static str, result: Result<(bool, String), GpcpError>| {
        let (pass, note) = match result {
            Ok((pass, note)) => (pass, note),
            Err(e) => (false, format!("error: {e}")),
        };
        checks.push(DemoCheck { name, pass, note });
    };

    let (a, b) = fixtures::example_2_1_pair();
    let orthant = crate::cone::Cone::orthant(2);

    record("er-pair search (example_2_1_pair)", {
        classify::find_er_counterexample(&a, &b, &orthant, SearchBudget::with_starts(1000), seed)
            .map(|v| (v.counterexample().is_none(), v.to_string()))
    });

    record("r0-pair search (example_2_1_pair)", {
        classify::find_r0_counterexample(&a, &b, &orthant, SearchBudget::with_starts(500), seed)
            .map(|v| (v.counterexample().is_none(), v.to_string()))
    });

    let p51 = fixtures::example_5_1();
    let cfg = SolveConfig { seed, ..SolveConfig::default() };

    record("multistart solve (example_5_1)", {
        SampleBox::cube(2, 0.0, 3.0)
            .and_then(|sb| multistart_solve(&p51, &cfg, &sb))
            .map(|est| {
                let pass = est.len() == 1 && close(&est.points()[0], &[1.0, 1.0], 1e-8);
                let note = if est.is_empty() {
                    "no solutions".to_owned()
                } else {
                    format!("{} point(s), first {}", est.len(), format_point(&est.points()[0]))
                };
                (pass, note)
            })
    });

    record("pairwise growth falsified (example_5_1)", {
        errorbound::falsify_pairwise_growth(&p51, GrowthVariant::MaxProduct, &[0.01], 0, seed)
            .map(|res| match res.outcome {
                ProbeOutcome::ViolationFound(w) => (
                    close(&w.x, &[0.1, 0.05], 1e-12) && close(&w.y, &[0.1, 0.1], 1e-12),
                    format!("pair ({:?}, {:?}), product {:.6e}", w.x, w.y, w.value),
                ),
                ProbeOutcome::ConsistentWithinBudget(_) => {
                    (false, "no violating pair found".to_owned())
                }
            })
    });

    record("solution rate probe (example_5_1)", {
        let dirs = vec![vec![0.0, 1.0], vec![0.0, -1.0], vec![1.0, 0.0]];
        errorbound::probe_solution_rate(&p51, &[1.0, 1.0], &dirs, &errorbound::default_radii())
            .map(|res| match res.outcome {
                ProbeOutcome::ConsistentWithinBudget(fs) => {
                    let pass = (fs[0].limit_estimate - 1.0).abs() <= 0.05
                        && (fs[1].limit_estimate + 3.0).abs() <= 0.1
                        && (fs[2].limit_estimate - 3.0).abs() <= 0.1;
                    let limits: Vec<String> =
                        fs.iter().map(|f| format!("{:.4}", f.limit_estimate)).collect();
                    (pass, format!("limits [{}]", limits.join(", ")))
                }
                ProbeOutcome::ViolationFound(f) => {
                    (false, format!("unexpected violation along {:?}", f.direction))
                }
            })
    });

    record("error bound scan (example_5_1)", {
        SampleBox::cube(2, 0.0, 2.0)
            .and_then(|sb| {
                let est = multistart_solve(&p51, &cfg, &SampleBox::cube(2, 0.0, 3.0)?)?;
                errorbound::error_bound_scan(&p51, &est, &sb, 10_000, seed)
            })
            .map(|scan| {
                let tau_ok = scan.tau_fit.map(|t| (0.8..=1.2).contains(&t)).unwrap_or(false);
                (
                    scan.c_estimate.is_finite() && scan.c_estimate > 0.0 && tau_ok,
                    format!("c = {:.4}, tau = {:?}", scan.c_estimate, scan.tau_fit),
                )
            })
    });

    let tcp = fixtures::tcp_unit_demo();
    record("multistart solve (tcp_unit_demo)", {
        multistart_solve(&tcp, &cfg, &SampleBox::default_for(&tcp)).map(|est| {
            let pass = est.len() == 1 && close(&est.points()[0], &[1.0, 1.0], 1e-8);
            (pass, format!("{} point(s)", est.len()))
        })
    });

    let lcp = fixtures::lcp_demo();
    record("newton and homotopy agree (lcp_demo)", {
        newton_minmap(&lcp, &[0.5, 0.5], &cfg).and_then(|newton| {
            let trace = homotopy_solve(&lcp, &cfg)?;
            Ok(match (newton.solved(), trace.converged_point()) {
                (Some((xn, _)), Some(xh)) => {
                    let pass = close(xn, &[1.0, 2.0], 1e-10)
                        && xn.iter().zip(xh).all(|(a, b)| (a - b).abs() <= 1e-6);
                    (pass, format!("newton {}, homotopy {}", format_point(xn), format_point(xh)))
                }
                _ => (false, "a solver failed".to_owned()),
            })
        })
    });

    println!("{:<44} {:<6} note", "check", "status");
    println!("{}", "-".repeat(96));
    let mut all_pass = true;
    for c in &checks {
        all_pass &= c.pass;
        println!("{:<44} {:<6} {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.note);
    }
    println!("{}", "-".repeat(96));
    println!("{} / {} checks passed", checks.iter().filter(|c| c.pass).count(), checks.len());

    Ok(if all_pass { EXIT_OK } else { EXIT_SOLVER_FAILURE })
}
