//! `thetahyb` — hybrid maximum-weight stable set solver.
//!
//! Subcommands: `solve` (full hybrid pipeline), `cp-only` (pure CP
//! baseline), `theta` (relaxation only), `gen` (random instances),
//! `bench` (hybrid vs. baseline comparison table).
//!
//! Every option can also be set through a `THETAHYB_*` environment
//! variable; explicit flags win over the environment, which wins over the
//! built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use thetahyb_core::cp::cp_only_solve;
use thetahyb_core::hybrid::{hybrid_solve, run_bench, BenchRow, HybridConfig};
use thetahyb_core::report::{self, ReportRow};
use thetahyb_core::sdp::solve_sdp;
use thetahyb_core::theta::{build_theta, extract_scores, ThetaVariant};
use thetahyb_core::{gen_random_graph, parse_dimacs, write_dimacs, Graph};

#[derive(Parser)]
#[command(name = "thetahyb", version, about = "Hybrid stable set solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ThetaForm {
    X,
    Y,
}

impl From<ThetaForm> for ThetaVariant {
    fn from(f: ThetaForm) -> Self {
        match f {
            ThetaForm::X => ThetaVariant::XForm,
            ThetaForm::Y => ThetaVariant::YForm,
        }
    }
}

#[derive(Args)]
struct HybridOpts {
    /// Highest discrepancy level to search.
    #[arg(long, default_value_t = 4, env = "THETAHYB_MAX_DISCREPANCY")]
    max_discrepancy: usize,
    /// Theta formulation: x (trace-one) or y (lifted).
    #[arg(long, value_enum, default_value_t = ThetaForm::X, env = "THETAHYB_THETA_FORM")]
    theta_form: ThetaForm,
    /// Relative duality-gap tolerance for the relaxation.
    #[arg(long, default_value_t = 1e-7, env = "THETAHYB_SDP_TOL")]
    sdp_tol: f64,
    /// Re-solve the relaxation with a discrepancy cut before each level.
    /// Bounds from the cut skip levels but are never trusted as proofs.
    #[arg(long, env = "THETAHYB_CUTS")]
    cuts: bool,
    /// Overall wall-clock budget in seconds.
    #[arg(long, env = "THETAHYB_TIME_LIMIT")]
    time_limit: Option<f64>,
    /// Per-subproblem wall-clock budget in seconds.
    #[arg(long, env = "THETAHYB_SUBPROBLEM_TIME_LIMIT")]
    subproblem_time_limit: Option<f64>,
    /// Solve subproblems sequentially for reproducible reports.
    #[arg(long, env = "THETAHYB_DETERMINISTIC")]
    deterministic: bool,
    /// Skip the discrepancy-0 subproblem (it re-derives the rounding).
    #[arg(long, env = "THETAHYB_SKIP_D0")]
    skip_d0: bool,
    /// Worker threads for subproblem solving (0 = auto).
    #[arg(long, default_value_t = 0, env = "THETAHYB_THREADS")]
    threads: usize,
}

impl HybridOpts {
    fn to_config(&self) -> HybridConfig<f64> {
        HybridConfig {
            max_discrepancy: self.max_discrepancy,
            theta_variant: self.theta_form.into(),
            sdp_tol: self.sdp_tol,
            sdp_max_iter: 200,
            cp_time_limit_per_subproblem: self.subproblem_time_limit.map(Duration::from_secs_f64),
            total_time_limit: self.time_limit.map(Duration::from_secs_f64),
            enable_discrepancy_cuts: self.cuts,
            skip_discrepancy_zero: self.skip_d0,
            deterministic: self.deterministic,
            threads: self.threads,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the hybrid pipeline on one DIMACS instance.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: HybridOpts,
        /// Emit the result as one JSON object.
        #[arg(long, conflicts_with = "tsv")]
        json: bool,
        /// Emit the result as a TSV header plus one row.
        #[arg(long)]
        tsv: bool,
    },
    /// Pure CP branch and bound (the baseline side of the comparison).
    CpOnly {
        file: PathBuf,
        /// Wall-clock budget in seconds.
        #[arg(long, env = "THETAHYB_TIME_LIMIT")]
        time_limit: Option<f64>,
    },
    /// Solve only the relaxation and print theta plus solver statistics.
    Theta {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ThetaForm::X, env = "THETAHYB_THETA_FORM")]
        theta_form: ThetaForm,
        #[arg(long, default_value_t = 1e-7, env = "THETAHYB_SDP_TOL")]
        sdp_tol: f64,
    },
    /// Generate a random weighted instance in DIMACS form.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve many instances, hybrid vs. pure CP, and emit a TSV table.
    Bench {
        files: Vec<PathBuf>,
        #[command(flatten)]
        opts: HybridOpts,
        /// Wall-clock budget in seconds for the CP baseline.
        #[arg(long, env = "THETAHYB_BASELINE_LIMIT")]
        baseline_limit: Option<f64>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit nonzero if any instance had to be skipped.
        #[arg(long)]
        strict: bool,
    },
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve {
            file,
            opts,
            json,
            tsv,
        } => {
            let g = load_graph(&file)?;
            let report = hybrid_solve(&instance_name(&file), &g, &opts.to_config())?;
            if json {
                println!("{}", serde_json::to_string(&ReportRow::from_report(&report))?);
            } else if tsv {
                println!("{}", report::TSV_HEADER);
                println!("{}", report::tsv_row(&report));
            } else {
                print_human(&report);
            }
        }
        Command::CpOnly { file, time_limit } => {
            let g = load_graph(&file)?;
            let res = cp_only_solve(&g, time_limit.map(Duration::from_secs_f64));
            println!("instance: {}", instance_name(&file));
            println!("n: {}  m: {}", g.n(), g.m());
            match &res.best {
                Some(inc) => {
                    println!("best: {}", report::fmt_value(inc.value));
                    println!(
                        "set: {}",
                        inc.set
                            .iter()
                            .map(|v| (v + 1).to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    );
                }
                None => println!("best: none found"),
            }
            println!("status: {:?}", res.status);
            println!("backtracks: {}", res.backtracks);
            println!("nodes: {}", res.nodes);
            println!("time: {:.2}s", res.elapsed.as_secs_f64());
        }
        Command::Theta {
            file,
            theta_form,
            sdp_tol,
        } => {
            let g = load_graph(&file)?;
            let model = build_theta(&g, theta_form.into());
            let clock = std::time::Instant::now();
            let sol = solve_sdp(&model.problem, sdp_tol, 200)?;
            let elapsed = clock.elapsed().as_secs_f64();
            let relax = extract_scores(&model, &sol, &g)?;
            println!("instance: {}", instance_name(&file));
            println!("n: {}  m: {}", g.n(), g.m());
            println!(
                "formulation: {} (dim {}, {} constraints)",
                theta_form.into_variant_name(),
                model.problem.dim(),
                model.problem.num_constraints()
            );
            println!("theta (certified dual bound): {:.6}", relax.theta);
            println!("primal objective: {:.6}", sol.primal_obj);
            println!("dual objective: {:.6}", sol.dual_obj);
            println!("gap: {:.2e}", sol.gap);
            println!("primal residual: {:.2e}", sol.primal_residual);
            println!("dual residual: {:.2e}", sol.dual_residual);
            println!("iterations: {}", sol.iterations);
            println!("status: {:?}", sol.status);
            println!("time: {elapsed:.2}s");
        }
        Command::Gen {
            n,
            density,
            seed,
            out,
        } => {
            let g: Graph = gen_random_graph(n, density, seed)?;
            let text = write_dimacs(&g);
            match out {
                Some(path) => fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Bench {
            files,
            opts,
            baseline_limit,
            out,
            strict,
        } => {
            if files.is_empty() && strict {
                bail!("bench requires at least one instance in strict mode");
            }
            let instances: Vec<(String, Result<Graph, String>)> = files
                .iter()
                .map(|path| {
                    (
                        instance_name(path),
                        load_graph(path).map_err(|e| format!("{e:#}")),
                    )
                })
                .collect();
            let rows = run_bench(
                instances,
                &opts.to_config(),
                baseline_limit.map(Duration::from_secs_f64),
            );
            let mut text = String::new();
            text.push_str(report::BENCH_TSV_HEADER);
            text.push('\n');
            let mut skipped = 0usize;
            for row in &rows {
                match row {
                    BenchRow::Solved { report, baseline } => {
                        text.push_str(&report::bench_tsv_row(report, baseline));
                        text.push('\n');
                    }
                    BenchRow::Skipped { name, reason } => {
                        skipped += 1;
                        eprintln!("skipped {name}: {reason}");
                        text.push_str(&format!("# skipped {name}: {reason}\n"));
                    }
                }
            }
            match out {
                Some(path) => fs::write(&path, &text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            if strict && skipped > 0 {
                bail!("{skipped} instance(s) skipped in strict mode");
            }
        }
    }
    Ok(())
}

impl ThetaForm {
    fn into_variant_name(self) -> &'static str {
        ThetaVariant::from(self).as_str()
    }
}

fn print_human(r: &thetahyb_core::Report) {
    println!("instance: {}", r.name);
    println!("n: {}  m: {}", r.n, r.m);
    if r.degraded {
        println!("relaxation failed numerically; fell back to pure CP");
    } else {
        println!("theta: {:.4}", r.theta);
        println!("round: {}", report::fmt_value(r.round_value));
    }
    println!(
        "best: {}{}",
        report::fmt_value(r.best_value),
        if r.proven_optimal { " (optimal)" } else { "" }
    );
    println!("best discrepancy: {}", r.best_discrepancy);
    println!(
        "set: {}",
        r.best_set
            .iter()
            .map(|v| (v + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!(
        "time: sdp {:.2}s + subproblems {:.2}s = {:.2}s total",
        r.time_sdp, r.time_subproblems, r.time_total
    );
    println!("backtracks: {}", r.backtracks);
    for skip in &r.cut_skips {
        println!(
            "cut skipped level {} (bound {} <= incumbent {})",
            skip.level,
            report::fmt_value(skip.bound),
            report::fmt_value(skip.incumbent)
        );
    }
}
