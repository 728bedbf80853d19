//! Exhaustive reference solver.
//!
//! Enumerates all 2^n vertex subsets with bitmask adjacency. Deliberately
//! independent of the CP and SDP code paths: validation tests compare both
//! solvers against this one.

use crate::graph::WeightedGraph;
use crate::scalar::Real;

/// Maximum-weight stable set by full enumeration. Panics above 30 vertices.
pub fn max_weight_stable_set<F: Real>(g: &WeightedGraph<F>) -> (F, Vec<usize>) {
    let n = g.n();
    assert!(n <= 30, "oracle is exponential; refusing n > 30");
    let mut adj = vec![0u32; n];
    for &(i, j) in g.edges() {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    let mut best_value = F::zero();
    let mut best_mask: u32 = 0;
    for mask in 0u32..(1u32 << n) {
        let mut rest = mask;
        let mut value = F::zero();
        let mut stable = true;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj[v] & mask != 0 {
                stable = false;
                break;
            }
            value += g.weight(v);
        }
        if stable && value > best_value {
            best_value = value;
            best_mask = mask;
        }
    }
    let set: Vec<usize> = (0..n).filter(|&v| best_mask >> v & 1 == 1).collect();
    (best_value, set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, WeightedGraph};

    #[test]
    fn known_small_cases() {
        let c5: WeightedGraph<f64> = cycle_graph(5);
        assert_eq!(max_weight_stable_set(&c5).0, 2.0);

        let k4: WeightedGraph<f64> = complete_graph(4);
        assert_eq!(max_weight_stable_set(&k4).0, 1.0);

        // Triangle with weights 3, 2, 1: best is the single heaviest vertex.
        let k3 = WeightedGraph::new(3, vec![(0, 1), (0, 2), (1, 2)], vec![3.0, 2.0, 1.0]).unwrap();
        let (v, set) = max_weight_stable_set(&k3);
        assert_eq!(v, 3.0);
        assert_eq!(set, vec![0]);

        // Star K_{1,3}: the three leaves.
        let star = WeightedGraph::<f64>::unit_weights(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let (v, set) = max_weight_stable_set(&star);
        assert_eq!(v, 3.0);
        assert_eq!(set, vec![1, 2, 3]);
    }

    #[test]
    fn returned_set_matches_value_and_is_stable() {
        let g: WeightedGraph<f64> = crate::graph::gen_random_graph(14, 0.3, 99).unwrap();
        let (v, set) = max_weight_stable_set(&g);
        assert!(g.is_stable(&set));
        assert_eq!(g.set_weight(&set), v);
    }
}
