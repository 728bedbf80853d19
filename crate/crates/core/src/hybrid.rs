//! End-to-end hybrid solver.
//!
//! Pipeline: solve the theta relaxation once at the root, turn its diagonal
//! into a vertex ranking, round greedily for a first incumbent and the
//! V0/V1 partition, then walk discrepancy levels `k = 0, 1, …`, solving
//! every level-`k` subproblem with CP branch and bound under the incumbent
//! cutoff. The loop stops as soon as the incumbent meets the certified
//! relaxation bound (optimality proved) or limits run out.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cp::{self, CpResult, CpStatus, SharedIncumbent};
use crate::graph::WeightedGraph;
use crate::lds::subproblems_at;
use crate::rounding::greedy_partition;
use crate::scalar::Real;
use crate::sdp::{solve_sdp, SdpStatus};
use crate::theta::{
    add_discrepancy_cut, build_theta, certified_upper_bound, extract_scores, usable_upper_bound,
    ThetaError, ThetaVariant,
};

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Sdp(#[from] crate::sdp::SdpError),
}

#[derive(Clone, Debug)]
pub struct HybridConfig<F> {
    /// Highest discrepancy level to search (4 suits random instances,
    /// 2 the structured ones). Levels beyond |V0| are vacuous.
    pub max_discrepancy: usize,
    pub theta_variant: ThetaVariant,
    /// Relative-gap tolerance for the relaxation solve.
    pub sdp_tol: F,
    pub sdp_max_iter: usize,
    /// Wall-clock budget per CP subproblem (`None` = unlimited; the
    /// subproblems are small relative to the original problem).
    pub cp_time_limit_per_subproblem: Option<Duration>,
    /// Overall budget including the relaxation solve.
    pub total_time_limit: Option<Duration>,
    /// Re-solve the relaxation with the discrepancy cut before each level
    /// and skip levels the cut claims are fruitless. Off by default: the
    /// re-solve usually costs more than the subproblems it saves, and the
    /// cut's validity under the trace-one formulation is doubtful (see
    /// `theta::add_discrepancy_cut`); skips are therefore also excluded
    /// from optimality proofs.
    pub enable_discrepancy_cuts: bool,
    /// Skip the discrepancy-0 subproblem (its unique solution is the
    /// rounded one). Kept on by default as a cheap cross-check of the
    /// rounding against CP propagation.
    pub skip_discrepancy_zero: bool,
    /// Solve subproblems sequentially so backtrack totals and reports are
    /// reproducible run to run.
    pub deterministic: bool,
    /// Worker threads for subproblem solving (0 = auto). Ignored in
    /// deterministic mode.
    pub threads: usize,
}

impl<F: Real> Default for HybridConfig<F> {
    fn default() -> Self {
        HybridConfig {
            max_discrepancy: 4,
            theta_variant: ThetaVariant::XForm,
            sdp_tol: F::from_f64(1e-7),
            sdp_max_iter: 200,
            cp_time_limit_per_subproblem: None,
            total_time_limit: None,
            enable_discrepancy_cuts: false,
            skip_discrepancy_zero: false,
            deterministic: false,
            threads: 0,
        }
    }
}

/// A level skipped on the strength of a discrepancy cut.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSkip<F> {
    pub level: usize,
    /// Usable bound produced by the cut-strengthened relaxation.
    pub bound: F,
    /// Incumbent at the moment of the skip.
    pub incumbent: F,
}

/// One result row in the style of the benchmark table.
#[derive(Clone, Debug)]
pub struct RunReport<F> {
    pub name: String,
    pub n: usize,
    pub m: usize,
    /// Certified upper bound from the relaxation (NaN in degraded mode).
    pub theta: F,
    /// Value of the greedily rounded first solution (NaN in degraded mode).
    pub round_value: F,
    pub best_value: F,
    /// Smallest discrepancy level at which the final best value appeared
    /// (0 when rounding already produced it).
    pub best_discrepancy: usize,
    pub time_sdp: f64,
    pub time_subproblems: f64,
    pub time_total: f64,
    pub backtracks: u64,
    pub proven_optimal: bool,
    /// True when the relaxation failed numerically and the run fell back
    /// to the pure CP solver.
    pub degraded: bool,
    /// Witness stable set for `best_value`.
    pub best_set: Vec<usize>,
    /// Levels skipped by discrepancy cuts (empty unless cuts are enabled).
    pub cut_skips: Vec<CutSkip<F>>,
}

/// Runs the full hybrid pipeline on one instance.
pub fn hybrid_solve<F: Real>(
    name: &str,
    g: &WeightedGraph<F>,
    cfg: &HybridConfig<F>,
) -> Result<RunReport<F>, HybridError> {
    if !cfg.sdp_tol.is_finite() || cfg.sdp_tol <= F::zero() {
        return Err(HybridError::Config("sdp_tol must be positive".into()));
    }
    if cfg.enable_discrepancy_cuts && cfg.theta_variant != ThetaVariant::XForm {
        return Err(HybridError::Config(
            "discrepancy cuts require the X formulation".into(),
        ));
    }
    let start = Instant::now();
    let deadline = cfg.total_time_limit.map(|d| start + d);

    let model = build_theta(g, cfg.theta_variant);
    let sdp_clock = Instant::now();
    let sol = solve_sdp(&model.problem, cfg.sdp_tol, cfg.sdp_max_iter)?;
    let mut time_sdp = sdp_clock.elapsed().as_secs_f64();

    if sol.status == SdpStatus::NumericalFailure {
        return Ok(degraded_report(name, g, start, time_sdp, deadline));
    }
    let relax = extract_scores(&model, &sol, g)?;
    let theta = relax.theta;
    let integral = g.integral_weights();
    let upper = usable_upper_bound(theta, integral);
    let meets_upper = |value: F| {
        if integral {
            value >= upper
        } else {
            value >= theta - F::from_f64(1e-6)
        }
    };

    let partition = greedy_partition(g, &relax.scores);
    let round_value = g.set_weight(&partition.v0);
    let mut incumbent_value = round_value;
    let mut incumbent_set = partition.v0.clone();
    let mut best_discrepancy = 0;
    let mut backtracks: u64 = 0;
    let mut time_subproblems = 0.0;
    let mut cut_skips: Vec<CutSkip<F>> = Vec::new();
    let mut proven = meets_upper(incumbent_value);
    let mut timed_out = false;
    // Every subproblem fully searched: required for the enumeration proof.
    let mut enumeration_complete = true;

    let threads = if cfg.deterministic {
        1
    } else if cfg.threads == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get().min(8))
    } else {
        cfg.threads
    };

    let last_level = cfg.max_discrepancy.min(partition.v0.len());
    for k in 0..=last_level {
        if proven || timed_out {
            break;
        }
        if time_left(deadline).is_some_and(|d| d.is_zero()) {
            timed_out = true;
            break;
        }
        if k == 0 {
            if cfg.skip_discrepancy_zero {
                continue;
            }
            // The level-0 leaf re-derives the rounded solution through
            // propagation alone; a mismatch would be a solver bug.
            let sub = subproblems_at(&partition, 0).next().expect("level 0 exists");
            let clock = Instant::now();
            let res = cp::solve_subproblem(
                g,
                &sub,
                None,
                Some(upper),
                per_subproblem_limit(cfg, deadline),
            );
            time_subproblems += clock.elapsed().as_secs_f64();
            backtracks += res.backtracks;
            debug_assert_eq!(
                res.best_value(),
                Some(round_value),
                "discrepancy-0 propagation disagrees with rounding"
            );
            continue;
        }

        if cfg.enable_discrepancy_cuts {
            let cut_model = add_discrepancy_cut(&model, &partition.v0, k)?;
            let clock = Instant::now();
            let cut_sol = solve_sdp(&cut_model.problem, cfg.sdp_tol, cfg.sdp_max_iter)?;
            time_sdp += clock.elapsed().as_secs_f64();
            if cut_sol.status != SdpStatus::NumericalFailure {
                let bound = usable_upper_bound(
                    certified_upper_bound(&cut_model, &cut_sol),
                    integral,
                );
                if bound <= incumbent_value {
                    cut_skips.push(CutSkip {
                        level: k,
                        bound,
                        incumbent: incumbent_value,
                    });
                    continue;
                }
            }
        }

        let clock = Instant::now();
        let level = if threads <= 1 {
            solve_level_sequential(
                g,
                &partition,
                k,
                incumbent_value,
                upper,
                cfg,
                deadline,
                &meets_upper,
            )
        } else {
            solve_level_parallel(
                g,
                &partition,
                k,
                incumbent_value,
                &incumbent_set,
                upper,
                cfg,
                deadline,
                threads,
                &meets_upper,
            )
        };
        time_subproblems += clock.elapsed().as_secs_f64();
        backtracks += level.backtracks;
        enumeration_complete &= level.complete;
        timed_out |= level.timed_out;
        if let Some((value, set)) = level.improvement {
            debug_assert!(value > incumbent_value);
            incumbent_value = value;
            incumbent_set = set;
            best_discrepancy = k;
        }
        if meets_upper(incumbent_value) {
            proven = true;
        }
    }

    // Exhausting every level of the V0 tree is a proof as well, provided
    // nothing was truncated and no level was skipped on cut evidence alone.
    if !timed_out
        && enumeration_complete
        && cut_skips.is_empty()
        && cfg.max_discrepancy >= partition.v0.len()
    {
        proven = true;
    }

    Ok(RunReport {
        name: name.to_string(),
        n: g.n(),
        m: g.m(),
        theta,
        round_value,
        best_value: incumbent_value,
        best_discrepancy,
        time_sdp,
        time_subproblems,
        time_total: start.elapsed().as_secs_f64(),
        backtracks,
        proven_optimal: proven,
        degraded: false,
        best_set: incumbent_set,
        cut_skips,
    })
}

struct LevelOutcome<F> {
    improvement: Option<(F, Vec<usize>)>,
    backtracks: u64,
    timed_out: bool,
    complete: bool,
}

#[allow(clippy::too_many_arguments)]
fn solve_level_sequential<F: Real>(
    g: &WeightedGraph<F>,
    partition: &crate::rounding::DomainPartition<F>,
    k: usize,
    mut incumbent: F,
    upper: F,
    cfg: &HybridConfig<F>,
    deadline: Option<Instant>,
    meets_upper: &dyn Fn(F) -> bool,
) -> LevelOutcome<F> {
    let mut out = LevelOutcome {
        improvement: None,
        backtracks: 0,
        timed_out: false,
        complete: true,
    };
    for sub in subproblems_at(partition, k) {
        if time_left(deadline).is_some_and(|d| d.is_zero()) {
            out.timed_out = true;
            break;
        }
        let res = cp::solve_subproblem(
            g,
            &sub,
            Some(incumbent),
            Some(upper),
            per_subproblem_limit(cfg, deadline),
        );
        out.backtracks += res.backtracks;
        if res.status == CpStatus::TimeLimit {
            if time_left(deadline).is_some_and(|d| d.is_zero()) {
                out.timed_out = true;
            } else {
                out.complete = false;
            }
        }
        if let Some(inc) = res.best {
            if inc.value > incumbent {
                incumbent = inc.value;
                out.improvement = Some((inc.value, inc.set));
            }
        }
        if out.timed_out || meets_upper(incumbent) {
            break;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn solve_level_parallel<F: Real>(
    g: &WeightedGraph<F>,
    partition: &crate::rounding::DomainPartition<F>,
    k: usize,
    incumbent_value: F,
    incumbent_set: &[usize],
    upper: F,
    cfg: &HybridConfig<F>,
    deadline: Option<Instant>,
    threads: usize,
    meets_upper: &(dyn Fn(F) -> bool + Sync),
) -> LevelOutcome<F> {
    let shared = SharedIncumbent::new(incumbent_value, incumbent_set.to_vec());
    let stream = Mutex::new(subproblems_at(partition, k));
    let stop = AtomicBool::new(false);
    let timed_out = AtomicBool::new(false);
    let incomplete = AtomicBool::new(false);
    let backtracks = AtomicU64::new(0);

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                if time_left(deadline).is_some_and(|d| d.is_zero()) {
                    timed_out.store(true, Ordering::Relaxed);
                    stop.store(true, Ordering::Relaxed);
                    break;
                }
                let sub = { stream.lock().expect("subproblem stream").next() };
                let Some(sub) = sub else { break };
                let res = cp::solve_subproblem_shared(
                    g,
                    &sub,
                    &shared,
                    Some(upper),
                    per_subproblem_limit(cfg, deadline),
                );
                backtracks.fetch_add(res.backtracks, Ordering::Relaxed);
                if res.status == CpStatus::TimeLimit {
                    if time_left(deadline).is_some_and(|d| d.is_zero()) {
                        timed_out.store(true, Ordering::Relaxed);
                        stop.store(true, Ordering::Relaxed);
                    } else {
                        incomplete.store(true, Ordering::Relaxed);
                    }
                }
                if meets_upper(shared.value()) {
                    stop.store(true, Ordering::Relaxed);
                }
            });
        }
    });

    let snap = shared.snapshot();
    LevelOutcome {
        improvement: (snap.value > incumbent_value).then_some((snap.value, snap.set)),
        backtracks: backtracks.into_inner(),
        timed_out: timed_out.into_inner(),
        complete: !incomplete.into_inner(),
    }
}

fn per_subproblem_limit<F: Real>(
    cfg: &HybridConfig<F>,
    deadline: Option<Instant>,
) -> Option<Duration> {
    match (cfg.cp_time_limit_per_subproblem, time_left(deadline)) {
        (Some(per), Some(rem)) => Some(per.min(rem)),
        (Some(per), None) => Some(per),
        (None, rem) => rem,
    }
}

fn time_left(deadline: Option<Instant>) -> Option<Duration> {
    deadline.map(|d| d.saturating_duration_since(Instant::now()))
}

fn degraded_report<F: Real>(
    name: &str,
    g: &WeightedGraph<F>,
    start: Instant,
    time_sdp: f64,
    deadline: Option<Instant>,
) -> RunReport<F> {
    let clock = Instant::now();
    let res = cp::cp_only_solve(g, time_left(deadline));
    let time_subproblems = clock.elapsed().as_secs_f64();
    let (best_value, best_set) = res
        .best
        .map(|inc| (inc.value, inc.set))
        .unwrap_or((F::zero(), vec![]));
    RunReport {
        name: name.to_string(),
        n: g.n(),
        m: g.m(),
        theta: F::nan(),
        round_value: F::nan(),
        best_value,
        best_discrepancy: 0,
        time_sdp,
        time_subproblems,
        time_total: start.elapsed().as_secs_f64(),
        backtracks: res.backtracks,
        proven_optimal: res.status == CpStatus::Optimal,
        degraded: true,
        best_set,
        cut_skips: vec![],
    }
}

/// One row of a benchmark run.
#[derive(Debug)]
pub enum BenchRow<F: Real> {
    Solved {
        report: Box<RunReport<F>>,
        baseline: CpResult<F>,
    },
    Skipped {
        name: String,
        reason: String,
    },
}

/// Runs the hybrid solver and the pure-CP baseline (under
/// `baseline_time_limit`) on every instance. Unloadable instances become
/// skipped rows; the run continues.
pub fn run_bench<F: Real>(
    instances: Vec<(String, Result<WeightedGraph<F>, String>)>,
    cfg: &HybridConfig<F>,
    baseline_time_limit: Option<Duration>,
) -> Vec<BenchRow<F>> {
    instances
        .into_iter()
        .map(|(name, loaded)| match loaded {
            Err(reason) => BenchRow::Skipped { name, reason },
            Ok(g) => match hybrid_solve(&name, &g, cfg) {
                Err(e) => BenchRow::Skipped {
                    name,
                    reason: e.to_string(),
                },
                Ok(report) => {
                    let baseline = cp::cp_only_solve(&g, baseline_time_limit);
                    BenchRow::Solved {
                        report: Box::new(report),
                        baseline,
                    }
                }
            },
        })
        .collect()
}
