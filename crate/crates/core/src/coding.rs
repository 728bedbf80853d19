//! Structured instances from coding theory.
//!
//! Vertices are the binary words of length `bits`; two words are joined when
//! their single-error balls intersect, so a stable set is exactly a code
//! correcting one error of the given kind. These constructions reproduce the
//! published conflict graphs used as solver benchmarks; the edge counts are
//! pinned down in the tests (e.g. 64 words / 192 edges for the length-6
//! transposition channel).
//!
//! All instances are unweighted (every vertex weight 1).

use crate::graph::WeightedGraph;
use crate::scalar::Real;

fn transposition_ball(word: u32, bits: u32, end_around: bool) -> Vec<u32> {
    let mut ball = vec![word];
    let mut pairs: Vec<(u32, u32)> = (0..bits - 1).map(|i| (i, i + 1)).collect();
    if end_around {
        pairs.push((bits - 1, 0));
    }
    for (i, j) in pairs {
        if (word >> i) & 1 != (word >> j) & 1 {
            ball.push(word ^ (1 << i) ^ (1 << j));
        }
    }
    ball.sort_unstable();
    ball.dedup();
    ball
}

fn deletion_ball(word: u32, bits: u32) -> Vec<u32> {
    // Words of length bits-1 obtained by deleting one position.
    let mut ball = Vec::with_capacity(bits as usize);
    for pos in 0..bits {
        let low = word & ((1 << pos) - 1);
        let high = (word >> (pos + 1)) << pos;
        ball.push(low | high);
    }
    ball.sort_unstable();
    ball.dedup();
    ball
}

fn intersects(a: &[u32], b: &[u32]) -> bool {
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

fn ball_conflict_graph<F: Real>(bits: u32, ball: impl Fn(u32) -> Vec<u32>) -> WeightedGraph<F> {
    assert!((1..=12).contains(&bits), "bits out of supported range");
    let n = 1usize << bits;
    let balls: Vec<Vec<u32>> = (0..n as u32).map(ball).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if intersects(&balls[u], &balls[v]) {
                edges.push((u, v));
            }
        }
    }
    WeightedGraph::unit_weights(n, edges).expect("valid conflict graph")
}

/// Conflict graph of codes correcting one adjacent transposition
/// (`end_around = false` gives the `1tc` family, `true` the `1et` family).
pub fn transposition_code_graph<F: Real>(bits: u32, end_around: bool) -> WeightedGraph<F> {
    ball_conflict_graph(bits, |w| transposition_ball(w, bits, end_around))
}

/// Conflict graph of single-deletion-correcting codes (the `1dc` family).
pub fn deletion_code_graph<F: Real>(bits: u32) -> WeightedGraph<F> {
    ball_conflict_graph(bits, |w| deletion_ball(w, bits))
}
