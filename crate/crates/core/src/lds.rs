//! Limited-discrepancy subproblem generation.
//!
//! A subproblem at discrepancy `k` fixes exactly `k` of the `V0` vertices
//! to their bad value 0 and the rest to 1; `V1` vertices stay free. Levels
//! use exactly-`k` semantics, so iterating `k = 0, 1, 2, …` visits every
//! leaf of the V0 assignment tree exactly once, and running through
//! `k = |V0|` amounts to complete enumeration.
//!
//! The per-level stream is lazy (one subproblem materialized at a time) and
//! yields the `k`-subsets of V0 positions in lexicographic order.

use itertools::Itertools;

use crate::rounding::DomainPartition;
use crate::scalar::Real;

/// One LDS leaf: which V0 positions were flipped to 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subproblem {
    /// The level `k`; equals `flipped.len()`.
    pub discrepancy: usize,
    /// Positions into the partition's `v0` (selection order), ascending.
    pub flipped: Vec<usize>,
    /// `(vertex, value)` for every V0 vertex: flipped ones get `false` (0),
    /// the rest `true` (1). V1 vertices are absent, i.e. unassigned.
    pub fixed: Vec<(usize, bool)>,
}

/// All subproblems of discrepancy exactly `k`, lexicographic by flipped
/// positions. `k > |V0|` yields an empty stream.
pub fn subproblems_at<'a, F: Real>(
    partition: &'a DomainPartition<F>,
    k: usize,
) -> impl Iterator<Item = Subproblem> + 'a {
    let v0 = &partition.v0;
    (0..v0.len()).combinations(k).map(move |flipped| {
        let mut is_flipped = vec![false; v0.len()];
        for &pos in &flipped {
            is_flipped[pos] = true;
        }
        let fixed = v0
            .iter()
            .enumerate()
            .map(|(pos, &vertex)| (vertex, !is_flipped[pos]))
            .collect();
        Subproblem {
            discrepancy: k,
            flipped,
            fixed,
        }
    })
}

/// `Σ_{k=0}^{max_k} C(|V0|, k)`, saturating at `u128::MAX`.
pub fn total_subproblems<F: Real>(partition: &DomainPartition<F>, max_k: usize) -> u128 {
    let n = partition.v0.len();
    (0..=max_k.min(n)).fold(0u128, |acc, k| acc.saturating_add(binomial(n, k)))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        // Multiply before dividing keeps the intermediate integral.
        c = c.saturating_mul((n - k + i) as u128) / i as u128;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::rounding::greedy_partition;
    use std::collections::HashSet;

    /// Partition with |v0| = size (edgeless graph selects every vertex).
    fn partition_of_size(size: usize) -> DomainPartition<f64> {
        let g = WeightedGraph::<f64>::unit_weights(size.max(1), vec![]).unwrap();
        let scores = vec![1.0; size.max(1)];
        let mut p = greedy_partition(&g, &scores);
        if size == 0 {
            p.v0.clear();
        }
        p
    }

    #[test]
    fn discrepancy_zero_is_the_suggestion() {
        let p = partition_of_size(4);
        let subs: Vec<_> = subproblems_at(&p, 0).collect();
        assert_eq!(subs.len(), 1);
        assert!(subs[0].flipped.is_empty());
        assert!(subs[0].fixed.iter().all(|&(_, v)| v));
    }

    #[test]
    fn singleton_flips_in_order() {
        let p = partition_of_size(4);
        let subs: Vec<_> = subproblems_at(&p, 1).collect();
        assert_eq!(subs.len(), 4);
        for (i, sub) in subs.iter().enumerate() {
            assert_eq!(sub.flipped, vec![i]);
            assert_eq!(sub.fixed[i], (p.v0[i], false));
        }
    }

    #[test]
    fn five_choose_two_in_lex_order() {
        let p = partition_of_size(5);
        let subs: Vec<_> = subproblems_at(&p, 2).collect();
        assert_eq!(subs.len(), 10);
        assert_eq!(subs[0].flipped, vec![0, 1]);
        assert_eq!(subs[1].flipped, vec![0, 2]);
        assert_eq!(subs[9].flipped, vec![3, 4]);
    }

    #[test]
    fn beyond_v0_is_empty_not_an_error() {
        let p = partition_of_size(3);
        assert_eq!(subproblems_at(&p, 4).count(), 0);
    }

    #[test]
    fn totals() {
        assert_eq!(total_subproblems(&partition_of_size(10), 0), 1);
        assert_eq!(total_subproblems(&partition_of_size(10), 2), 56);
        assert_eq!(total_subproblems(&partition_of_size(12), 12), 1 << 12);
        assert_eq!(total_subproblems(&partition_of_size(5), 9), 32);
    }

    #[test]
    fn union_over_levels_is_exactly_the_hypercube() {
        for size in [0usize, 1, 5, 12] {
            let p = partition_of_size(size);
            let mut seen = HashSet::new();
            let mut count = 0u64;
            for k in 0..=size {
                for sub in subproblems_at(&p, k) {
                    assert_eq!(sub.discrepancy, k);
                    assert_eq!(sub.flipped.len(), k);
                    assert_eq!(sub.fixed.len(), size);
                    let mask: u64 = sub
                        .fixed
                        .iter()
                        .enumerate()
                        .map(|(pos, &(_, v))| (v as u64) << pos)
                        .sum();
                    assert!(seen.insert(mask), "duplicate assignment at k={k}");
                    count += 1;
                }
            }
            assert_eq!(count, 1 << size, "|v0| = {size}");
            assert_eq!(seen.len(), 1 << size);
        }
    }

    #[test]
    fn binomial_saturates_instead_of_overflowing() {
        // C(130, 65) overflows u128; the count must clamp, not panic.
        let p = partition_of_size(130);
        assert!(total_subproblems(&p, 130) >= u128::MAX / 2);
    }
}
