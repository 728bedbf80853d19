//! Greedy rounding of relaxation scores.
//!
//! One pass drives both outputs: repeatedly take the unhandled vertex with
//! the highest score (ties broken toward the lowest index), put it in `V0`,
//! and mark its unhandled neighbours as `V1`. `V0` is then simultaneously a
//! feasible stable set (the first lower bound) and the set of variables the
//! discrepancy search will branch on; every `V1` vertex keeps domain {0, 1}.
//!
//! Scores are consumed as opaque reals, so tests can inject hand-crafted
//! rankings.

use crate::graph::WeightedGraph;
use crate::scalar::Real;

/// The V0/V1 split produced by greedy rounding.
///
/// Invariants (enforced by construction): `v0` is a stable set; `v0` and
/// `v1` partition the vertices; every `v1` vertex has a neighbour in `v0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainPartition<F> {
    /// Selected vertices in selection order (good value 1, bad value 0).
    pub v0: Vec<usize>,
    /// Remaining vertices, ascending; their domain stays {0, 1}.
    pub v1: Vec<usize>,
    /// The scores the ranking was computed from.
    pub scores: Vec<F>,
}

/// A rounded feasible solution: the `v0` of the partition and its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundedSolution<F> {
    pub selected: Vec<usize>,
    pub value: F,
}

/// Greedy V0/V1 partition. `scores` must hold one finite entry per vertex.
pub fn greedy_partition<F: Real>(g: &WeightedGraph<F>, scores: &[F]) -> DomainPartition<F> {
    let n = g.n();
    assert_eq!(scores.len(), n, "one score per vertex required");
    assert!(
        scores.iter().all(|s| s.is_finite()),
        "scores must be finite"
    );
    let mut handled = vec![false; n];
    let mut in_v0 = vec![false; n];
    let mut v0 = Vec::new();
    loop {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if handled[v] {
                continue;
            }
            match pick {
                // Strict > keeps the lowest index on ties.
                Some(p) if scores[v] > scores[p] => pick = Some(v),
                None => pick = Some(v),
                _ => {}
            }
        }
        let Some(v) = pick else { break };
        handled[v] = true;
        in_v0[v] = true;
        v0.push(v);
        for &u in g.neighbors(v) {
            handled[u] = true;
        }
    }
    let v1 = (0..n).filter(|&v| !in_v0[v]).collect();
    DomainPartition {
        v0,
        v1,
        scores: scores.to_vec(),
    }
}

/// Feasible integer solution from the same greedy pass: instantiate each
/// selected vertex to 1 and its neighbours to 0.
pub fn greedy_round<F: Real>(g: &WeightedGraph<F>, scores: &[F]) -> RoundedSolution<F> {
    let partition = greedy_partition(g, scores);
    let value = g.set_weight(&partition.v0);
    RoundedSolution {
        selected: partition.v0,
        value,
    }
}
