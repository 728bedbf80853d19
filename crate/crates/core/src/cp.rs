//! Constraint-programming solver for the binary stable set model.
//!
//! Variables are `x_v ∈ {0, 1}` with `x_i + x_j ≤ 1` per edge and objective
//! `max Σ w_v x_v`. Propagation is the edge rule: fixing a vertex to 1
//! removes 1 from every neighbour's domain. The search is depth-first
//! branch and bound with a fixed order — free vertex of maximum weight
//! first (ties toward the lowest index), value 1 tried before 0 — so node
//! and backtrack counts are reproducible. The bound is the plain residual
//! weight sum: weight already fixed to 1 plus everything still free.
//!
//! Solves are sequential; concurrent subproblem solves share progress
//! through a monotone best-value register read at node entry.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::graph::WeightedGraph;
use crate::lds::Subproblem;
use crate::scalar::Real;

/// Domain of one binary variable; domains only ever shrink.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Both,
    Zero,
    One,
}

/// Stable set model: a graph plus current per-vertex domains.
#[derive(Clone, Debug)]
pub struct CpModel<'g, F: Real> {
    graph: &'g WeightedGraph<F>,
    domains: Vec<Domain>,
}

/// Marker for a propagation wipeout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Infeasible;

impl<'g, F: Real> CpModel<'g, F> {
    /// Unrestricted model: every domain {0, 1}.
    pub fn new(graph: &'g WeightedGraph<F>) -> Self {
        CpModel {
            domains: vec![Domain::Both; graph.n()],
            graph,
        }
    }

    pub fn with_domains(graph: &'g WeightedGraph<F>, domains: Vec<Domain>) -> Self {
        assert_eq!(domains.len(), graph.n(), "one domain per vertex");
        CpModel { graph, domains }
    }

    /// Model for an LDS subproblem: V0 vertices fixed per the assignment,
    /// everything else free.
    pub fn for_subproblem(graph: &'g WeightedGraph<F>, sub: &Subproblem) -> Self {
        let mut domains = vec![Domain::Both; graph.n()];
        for &(vertex, value) in &sub.fixed {
            domains[vertex] = if value { Domain::One } else { Domain::Zero };
        }
        CpModel { graph, domains }
    }

    pub fn graph(&self) -> &'g WeightedGraph<F> {
        self.graph
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }
}

/// Fixed point of the edge rule: every neighbour of a 1-vertex loses
/// value 1. Returns the reduced model, or `Infeasible` on a domain
/// wipeout (two adjacent vertices both fixed to 1). Idempotent.
pub fn propagate<'g, F: Real>(model: &CpModel<'g, F>) -> Result<CpModel<'g, F>, Infeasible> {
    let mut domains = model.domains.clone();
    propagate_in_place(model.graph, &mut domains)?;
    Ok(CpModel {
        graph: model.graph,
        domains,
    })
}

fn propagate_in_place<F: Real>(
    g: &WeightedGraph<F>,
    domains: &mut [Domain],
) -> Result<(), Infeasible> {
    // A vertex fixed to 0 constrains nothing, so one pass over the
    // 1-vertices reaches the fixed point.
    for v in 0..g.n() {
        if domains[v] == Domain::One {
            for &u in g.neighbors(v) {
                match domains[u] {
                    Domain::One => return Err(Infeasible),
                    Domain::Both => domains[u] = Domain::Zero,
                    Domain::Zero => {}
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    /// Search space exhausted under the cutoffs, or the upper cutoff was
    /// attained: the reported value is optimal for this model.
    Optimal,
    /// The fixed assignment is contradictory.
    Infeasible,
    /// `upper_cutoff <= lower_cutoff` on entry: nothing to search for.
    CutoffReached,
    /// Wall clock expired; the incumbent (if any) is still valid.
    TimeLimit,
}

/// A feasible solution found by the search.
#[derive(Clone, Debug, PartialEq)]
pub struct Incumbent<F> {
    pub value: F,
    pub set: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CpResult<F> {
    /// Best solution strictly better than the lower cutoff, if any was
    /// found. `None` means "no improvement exists (or was found in time)",
    /// the explicit form of the -infinity sentinel.
    pub best: Option<Incumbent<F>>,
    pub backtracks: u64,
    pub nodes: u64,
    pub status: CpStatus,
    pub elapsed: Duration,
}

impl<F: Real> CpResult<F> {
    pub fn best_value(&self) -> Option<F> {
        self.best.as_ref().map(|inc| inc.value)
    }
}

/// Monotone best-value register shared between concurrent subproblem
/// solves. The value is kept as ordered `f64` bits (weights are positive,
/// so the IEEE ordering matches numeric ordering); the witness set is
/// updated under a mutex.
pub struct SharedIncumbent<F: Real> {
    bits: AtomicU64,
    best: Mutex<Incumbent<F>>,
}

impl<F: Real> SharedIncumbent<F> {
    pub fn new(value: F, set: Vec<usize>) -> Self {
        debug_assert!(value >= F::zero());
        SharedIncumbent {
            bits: AtomicU64::new(value.to_f64().to_bits()),
            best: Mutex::new(Incumbent { value, set }),
        }
    }

    pub fn value(&self) -> F {
        F::from_f64(f64::from_bits(self.bits.load(Ordering::Relaxed)))
    }

    /// Records `candidate` if it improves; returns whether it did.
    pub fn offer(&self, value: F, set: &[usize]) -> bool {
        let new_bits = value.to_f64().to_bits();
        let mut cur = self.bits.load(Ordering::Relaxed);
        loop {
            if f64::from_bits(cur) >= value.to_f64() {
                return false;
            }
            match self
                .bits
                .compare_exchange(cur, new_bits, Ordering::Relaxed, Ordering::Relaxed)
            {
                Ok(_) => break,
                Err(observed) => cur = observed,
            }
        }
        let mut guard = self.best.lock().expect("incumbent lock");
        if value > guard.value {
            guard.value = value;
            guard.set = set.to_vec();
        }
        true
    }

    pub fn snapshot(&self) -> Incumbent<F> {
        self.best.lock().expect("incumbent lock").clone()
    }
}

/// Depth-first branch and bound over the model.
///
/// * `lower_cutoff`: only solutions strictly better count (and prune).
/// * `upper_cutoff`: a certified bound; reaching it stops the search with
///   status `Optimal`. `upper <= lower` on entry returns `CutoffReached`
///   without searching.
/// * `time_limit`: checked every 1024 nodes.
pub fn branch_and_bound<F: Real>(
    model: &CpModel<'_, F>,
    lower_cutoff: Option<F>,
    upper_cutoff: Option<F>,
    time_limit: Option<Duration>,
) -> CpResult<F> {
    search(model, lower_cutoff, upper_cutoff, time_limit, None)
}

pub(crate) fn search<F: Real>(
    model: &CpModel<'_, F>,
    lower_cutoff: Option<F>,
    upper_cutoff: Option<F>,
    time_limit: Option<Duration>,
    shared: Option<&SharedIncumbent<F>>,
) -> CpResult<F> {
    let start = Instant::now();
    if let (Some(lo), Some(up)) = (lower_cutoff, upper_cutoff) {
        if up <= lo {
            return CpResult {
                best: None,
                backtracks: 0,
                nodes: 0,
                status: CpStatus::CutoffReached,
                elapsed: start.elapsed(),
            };
        }
    }

    let g = model.graph;
    let mut domains = model.domains.clone();
    if propagate_in_place(g, &mut domains).is_err() {
        return CpResult {
            best: None,
            backtracks: 0,
            nodes: 0,
            status: CpStatus::Infeasible,
            elapsed: start.elapsed(),
        };
    }

    // Static branching order: maximum weight first, ties by lowest index.
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| {
        g.weight(b)
            .partial_cmp(&g.weight(a))
            .expect("finite weights")
            .then(a.cmp(&b))
    });

    let mut fixed_weight = F::zero();
    let mut free_weight = F::zero();
    for (v, d) in domains.iter().enumerate() {
        match d {
            Domain::One => fixed_weight += g.weight(v),
            Domain::Both => free_weight += g.weight(v),
            Domain::Zero => {}
        }
    }

    let mut s = Searcher {
        g,
        order,
        domains,
        fixed_weight,
        free_weight,
        lower_cutoff,
        upper_cutoff,
        best: None,
        shared,
        deadline: time_limit.map(|d| start + d),
        backtracks: 0,
        nodes: 0,
        reached_upper: false,
        timed_out: false,
    };
    s.dfs(0);

    if let Some(inc) = &s.best {
        assert!(g.is_stable(&inc.set), "search produced an unstable set");
    }
    let status = if s.timed_out {
        CpStatus::TimeLimit
    } else {
        CpStatus::Optimal
    };
    CpResult {
        best: s.best,
        backtracks: s.backtracks,
        nodes: s.nodes,
        status,
        elapsed: start.elapsed(),
    }
}

struct Searcher<'a, F: Real> {
    g: &'a WeightedGraph<F>,
    order: Vec<usize>,
    domains: Vec<Domain>,
    fixed_weight: F,
    free_weight: F,
    lower_cutoff: Option<F>,
    upper_cutoff: Option<F>,
    best: Option<Incumbent<F>>,
    shared: Option<&'a SharedIncumbent<F>>,
    deadline: Option<Instant>,
    backtracks: u64,
    nodes: u64,
    reached_upper: bool,
    timed_out: bool,
}

impl<F: Real> Searcher<'_, F> {
    fn done(&self) -> bool {
        self.reached_upper || self.timed_out
    }

    /// Value any candidate must strictly exceed.
    fn threshold(&self) -> Option<F> {
        let mut t = self.lower_cutoff;
        if let Some(inc) = &self.best {
            t = Some(t.map_or(inc.value, |v| v.max(inc.value)));
        }
        if let Some(shared) = self.shared {
            let sv = shared.value();
            t = Some(t.map_or(sv, |v| v.max(sv)));
        }
        t
    }

    fn record_leaf(&mut self) {
        let value = self.fixed_weight;
        if self.threshold().is_some_and(|t| value <= t) {
            return;
        }
        let set: Vec<usize> = (0..self.g.n())
            .filter(|&v| self.domains[v] == Domain::One)
            .collect();
        if let Some(shared) = self.shared {
            shared.offer(value, &set);
        }
        self.best = Some(Incumbent { value, set });
        if self.upper_cutoff.is_some_and(|up| value >= up) {
            self.reached_upper = true;
        }
    }

    fn dfs(&mut self, order_from: usize) {
        if self.done() {
            return;
        }
        self.nodes += 1;
        if self.nodes & 1023 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                    return;
                }
            }
        }
        if self
            .threshold()
            .is_some_and(|t| self.fixed_weight + self.free_weight <= t)
        {
            return;
        }
        // Positions before order_from are already fixed in this subtree.
        let found = self.order[order_from..]
            .iter()
            .enumerate()
            .find(|&(_, &v)| self.domains[v] == Domain::Both);
        let Some((offset, &v)) = found else {
            self.record_leaf();
            return;
        };
        let next_from = order_from + offset + 1;

        // Value 1 first, neighbours forced to 0.
        let mut trail: Vec<(usize, Domain)> = vec![(v, Domain::Both)];
        self.domains[v] = Domain::One;
        self.fixed_weight += self.g.weight(v);
        self.free_weight -= self.g.weight(v);
        for &u in self.g.neighbors(v) {
            if self.domains[u] == Domain::Both {
                trail.push((u, Domain::Both));
                self.domains[u] = Domain::Zero;
                self.free_weight -= self.g.weight(u);
            }
        }
        self.dfs(next_from);
        self.undo(&trail);
        if self.done() {
            return;
        }
        self.backtracks += 1;

        // Value 0.
        self.domains[v] = Domain::Zero;
        self.free_weight -= self.g.weight(v);
        self.dfs(next_from);
        self.domains[v] = Domain::Both;
        self.free_weight += self.g.weight(v);
        if self.done() {
            return;
        }
        self.backtracks += 1;
    }

    fn undo(&mut self, trail: &[(usize, Domain)]) {
        for &(u, old) in trail {
            debug_assert_eq!(old, Domain::Both, "trail records Both -> fixed only");
            match self.domains[u] {
                Domain::One => {
                    self.fixed_weight -= self.g.weight(u);
                    self.free_weight += self.g.weight(u);
                }
                Domain::Zero => self.free_weight += self.g.weight(u),
                Domain::Both => unreachable!("trail entries were fixed"),
            }
            self.domains[u] = old;
        }
    }
}

/// Solves one LDS subproblem: builds the model from the fixed assignment,
/// propagates, then runs branch and bound with the caller's incumbent as
/// lower cutoff and the relaxation bound as upper cutoff.
pub fn solve_subproblem<F: Real>(
    g: &WeightedGraph<F>,
    sub: &Subproblem,
    incumbent: Option<F>,
    upper: Option<F>,
    time_limit: Option<Duration>,
) -> CpResult<F> {
    let model = CpModel::for_subproblem(g, sub);
    branch_and_bound(&model, incumbent, upper, time_limit)
}

pub(crate) fn solve_subproblem_shared<F: Real>(
    g: &WeightedGraph<F>,
    sub: &Subproblem,
    shared: &SharedIncumbent<F>,
    upper: Option<F>,
    time_limit: Option<Duration>,
) -> CpResult<F> {
    let model = CpModel::for_subproblem(g, sub);
    if let Some(up) = upper {
        if up <= shared.value() {
            return CpResult {
                best: None,
                backtracks: 0,
                nodes: 0,
                status: CpStatus::CutoffReached,
                elapsed: Duration::ZERO,
            };
        }
    }
    search(&model, None, upper, time_limit, Some(shared))
}

/// Pure CP baseline: branch and bound on the unrestricted model. The only
/// upper cutoff is the trivial total-weight bound.
pub fn cp_only_solve<F: Real>(g: &WeightedGraph<F>, time_limit: Option<Duration>) -> CpResult<F> {
    let model = CpModel::new(g);
    let total: F = g.weights().iter().cloned().sum();
    branch_and_bound(&model, None, Some(total), time_limit)
}
