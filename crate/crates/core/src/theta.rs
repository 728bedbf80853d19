//! Theta-number relaxations of the stable set problem.
//!
//! Two equivalent SDP formulations are provided:
//!
//! * **X form** (default): `max tr(WX)` over `tr(X) = 1`, `X_ij = 0` on
//!   edges, `X ⪰ 0`, with `W_ii = w_i` and `W_ij = √(w_i w_j)`. Matrices of
//!   dimension `n`, `m + 1` constraints.
//! * **Y form**: the lifted `(n+1)×(n+1)` program with linking constraints
//!   `Y_ii = ½Y_i0 + ½Y_0i`, edge constraints, and `Y_00 = 1`. Without the
//!   corner pin the program is unbounded (any feasible `Y` scales), so the
//!   model carries `m + n + 1` constraints.
//!
//! The reported theta is a *certified* dual bound: starting from the dual
//! vector `y`, the slack `Z' = Σ y_j A_j − C` is formed exactly and any
//! negative eigenvalue is compensated against the known trace bound of the
//! feasible set (`tr X = 1`, resp. `tr Y ≤ n+1`). A feasible stable set can
//! therefore never exceed the returned value, even for an unconverged solve.

use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::linalg::{Mat, SparseSym};
use crate::scalar::Real;
use crate::sdp::{solve_sdp, SdpError, SdpProblem, SdpSolution, SdpStatus};

/// Tolerance used when turning an integral-weight theta bound into the
/// usable integer bound `⌊theta + EPS_ROUND⌋`.
pub const EPS_ROUND: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaVariant {
    XForm,
    YForm,
}

impl ThetaVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ThetaVariant::XForm => "x",
            ThetaVariant::YForm => "y",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ThetaError {
    #[error("discrepancy cuts are only defined for the X formulation")]
    CutRequiresXForm,
    #[error("cut vertex list must be nonempty")]
    EmptyCutSet,
    #[error("cut discrepancy {0} exceeds |V0| = {1}")]
    CutDiscrepancyTooLarge(usize, usize),
    #[error("relaxation solve failed numerically")]
    SdpFailed,
    #[error(transparent)]
    Sdp(#[from] SdpError),
}

/// A theta SDP together with the mapping from graph vertices to the
/// diagonal entries carrying their ranking scores.
#[derive(Clone, Debug)]
pub struct ThetaModel<F> {
    pub variant: ThetaVariant,
    pub problem: SdpProblem<F>,
    pub vertex_to_diag: Vec<usize>,
}

/// Relaxation outcome: the certified upper bound, per-vertex scores used
/// for ranking, and the raw SDP solution.
#[derive(Clone, Debug)]
pub struct ThetaResult<F> {
    pub theta: F,
    pub scores: Vec<F>,
    pub sdp: SdpSolution<F>,
}

/// Builds the trace-one formulation (dimension `n`, `m + 1` constraints).
pub fn build_theta_x<F: Real>(g: &WeightedGraph<F>) -> ThetaModel<F> {
    let n = g.n();
    let mut cost = Mat::zeros(n, n);
    for i in 0..n {
        cost[(i, i)] = g.weight(i);
        for j in (i + 1)..n {
            let v = (g.weight(i) * g.weight(j)).sqrt();
            cost[(i, j)] = v;
            cost[(j, i)] = v;
        }
    }
    let mut constraints = Vec::with_capacity(g.m() + 1);
    let trace = SparseSym::new(n, (0..n).map(|i| (i, i, F::one())).collect());
    constraints.push((trace, F::one()));
    for &(i, j) in g.edges() {
        constraints.push((SparseSym::new(n, vec![(i, j, F::half())]), F::zero()));
    }
    ThetaModel {
        variant: ThetaVariant::XForm,
        problem: SdpProblem::new(cost, constraints).expect("theta model is well-formed"),
        vertex_to_diag: (0..n).collect(),
    }
}

/// Builds the lifted formulation (dimension `n + 1`; `n` linking plus `m`
/// edge constraints plus the `Y_00 = 1` normalization).
pub fn build_theta_y<F: Real>(g: &WeightedGraph<F>) -> ThetaModel<F> {
    let n = g.n();
    let dim = n + 1;
    let mut cost = Mat::zeros(dim, dim);
    for i in 0..n {
        cost[(i + 1, i + 1)] = g.weight(i);
    }
    let mut constraints = Vec::with_capacity(n + g.m() + 1);
    for i in 0..n {
        let a = SparseSym::new(
            dim,
            vec![(i + 1, i + 1, F::one()), (0, i + 1, -F::half())],
        );
        constraints.push((a, F::zero()));
    }
    for &(i, j) in g.edges() {
        constraints.push((SparseSym::new(dim, vec![(i + 1, j + 1, F::half())]), F::zero()));
    }
    constraints.push((SparseSym::new(dim, vec![(0, 0, F::one())]), F::one()));
    ThetaModel {
        variant: ThetaVariant::YForm,
        problem: SdpProblem::new(cost, constraints).expect("theta model is well-formed"),
        vertex_to_diag: (1..=n).collect(),
    }
}

pub fn build_theta<F: Real>(g: &WeightedGraph<F>, variant: ThetaVariant) -> ThetaModel<F> {
    match variant {
        ThetaVariant::XForm => build_theta_x(g),
        ThetaVariant::YForm => build_theta_y(g),
    }
}

/// Upper bound on `tr` of any feasible matrix of the formulation, used to
/// compensate slightly-infeasible dual slacks when certifying the bound.
fn trace_bound<F: Real>(model: &ThetaModel<F>) -> F {
    match model.variant {
        ThetaVariant::XForm => F::one(),
        ThetaVariant::YForm => F::from_usize(model.problem.dim()),
    }
}

/// Dual objective corrected into a valid upper bound: `bᵀy − min(0, λ_min)·T`
/// where `λ_min` is the smallest eigenvalue of the exact dual slack and `T`
/// the trace bound of the feasible set.
pub fn certified_upper_bound<F: Real>(model: &ThetaModel<F>, sol: &SdpSolution<F>) -> F {
    let p = &model.problem;
    let mut slack = p.cost().clone();
    slack.scale(-F::one());
    for (k, (a, _)) in p.constraints().iter().enumerate() {
        a.add_into(&mut slack, sol.dual_y[k]);
    }
    let lam_min = slack.min_eigenvalue();
    let dual_obj: F = p
        .constraints()
        .iter()
        .zip(&sol.dual_y)
        .map(|((_, b), &y)| *b * y)
        .sum();
    if lam_min >= F::zero() {
        dual_obj
    } else {
        dual_obj - lam_min * trace_bound(model)
    }
}

/// Reads the per-vertex scores off the solved relaxation and certifies the
/// bound. X-form diagonals sum to one, so they are rescaled to max 1 for
/// comparability with the Y-form diagonal (the ranking is unaffected);
/// Y-form diagonals are already in `[0, 1]` and are taken as-is.
pub fn extract_scores<F: Real>(
    model: &ThetaModel<F>,
    sol: &SdpSolution<F>,
    g: &WeightedGraph<F>,
) -> Result<ThetaResult<F>, ThetaError> {
    if sol.status == SdpStatus::NumericalFailure {
        return Err(ThetaError::SdpFailed);
    }
    let raw: Vec<F> = model
        .vertex_to_diag
        .iter()
        .map(|&d| sol.primal_x[(d, d)].max(F::zero()))
        .collect();
    debug_assert_eq!(raw.len(), g.n());
    let scores = match model.variant {
        ThetaVariant::XForm => {
            let max = raw.iter().cloned().fold(F::zero(), F::max);
            if max > F::zero() {
                raw.iter().map(|&s| s / max).collect()
            } else {
                raw
            }
        }
        ThetaVariant::YForm => raw,
    };
    Ok(ThetaResult {
        theta: certified_upper_bound(model, sol),
        scores,
        sdp: sol.clone(),
    })
}

/// Builds, solves and scores in one step.
pub fn solve_theta<F: Real>(
    g: &WeightedGraph<F>,
    variant: ThetaVariant,
    tol: F,
    max_iter: usize,
) -> Result<ThetaResult<F>, ThetaError> {
    let model = build_theta(g, variant);
    let sol = solve_sdp(&model.problem, tol, max_iter)?;
    extract_scores(&model, &sol, g)
}

/// Appends the discrepancy cut `tr(AX) = |V0| − k` with `A_ij = 1` iff
/// `i ∈ V0` or `j ∈ V0`. Returns a new model; the input is unchanged.
///
/// The cut is stated for the X formulation only. Note the caveat on
/// [`crate::hybrid::HybridConfig::enable_discrepancy_cuts`]: under the
/// trace-one normalization this equality need not hold for stable sets that
/// use vertices outside `V0`, so bounds derived from it are not trusted as
/// optimality proofs.
pub fn add_discrepancy_cut<F: Real>(
    model: &ThetaModel<F>,
    v0: &[usize],
    k: usize,
) -> Result<ThetaModel<F>, ThetaError> {
    if model.variant != ThetaVariant::XForm {
        return Err(ThetaError::CutRequiresXForm);
    }
    if v0.is_empty() {
        return Err(ThetaError::EmptyCutSet);
    }
    if k > v0.len() {
        return Err(ThetaError::CutDiscrepancyTooLarge(k, v0.len()));
    }
    let n = model.problem.dim();
    let mut in_v0 = vec![false; n];
    for &v in v0 {
        in_v0[v] = true;
    }
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            if in_v0[i] || in_v0[j] {
                entries.push((i, j, F::one()));
            }
        }
    }
    let a = SparseSym::new(n, entries);
    let b = F::from_usize(v0.len() - k);
    let problem = model.problem.with_constraint(a, b)?;
    Ok(ThetaModel {
        variant: model.variant,
        problem,
        vertex_to_diag: model.vertex_to_diag.clone(),
    })
}

/// The bound actually usable against integral incumbents:
/// `⌊theta + 1e-6⌋` when every weight is an integer, `theta` otherwise.
pub fn usable_upper_bound<F: Real>(theta: F, integral_weights: bool) -> F {
    if integral_weights {
        (theta + F::from_f64(EPS_ROUND)).floor()
    } else {
        theta
    }
}
