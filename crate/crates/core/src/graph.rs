//! Weighted undirected graphs, DIMACS-style file I/O and the random
//! instance generator.
//!
//! Vertices are 0-based internally; the DIMACS text format is 1-based.
//! Graphs are immutable after construction and safe to share across
//! concurrent solves.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight of vertex {0} must be positive and finite")]
    NonPositiveWeight(usize),
    #[error("edge density {0} outside [0, 1]")]
    InvalidDensity(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: vertex {vertex} out of range (n = {n})")]
    Range { line: usize, vertex: usize, n: usize },
    #[error("line {line}: duplicate edge ({i}, {j})")]
    DuplicateEdge { line: usize, i: usize, j: usize },
    #[error("missing problem line \"p edge <n> <m>\"")]
    MissingProblemLine,
    #[error("edge count mismatch: problem line says {expected}, found {got}")]
    EdgeCount { expected: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Undirected graph with positive per-vertex weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph<F> {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<F>,
    adjacency: Vec<Vec<usize>>,
}

impl<F: Real> WeightedGraph<F> {
    /// Builds a graph, validating all structural invariants: no self-loops,
    /// no duplicate edges, exactly `n` strictly positive finite weights.
    pub fn new(
        n: usize,
        mut edges: Vec<(usize, usize)>,
        weights: Vec<F>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if weights.len() != n {
            return Err(GraphError::WeightCount {
                expected: n,
                got: weights.len(),
            });
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w <= F::zero() {
                return Err(GraphError::NonPositiveWeight(i));
            }
        }
        for e in &mut edges {
            if e.0 == e.1 {
                return Err(GraphError::SelfLoop(e.0));
            }
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
            if e.1 >= n {
                return Err(GraphError::VertexOutOfRange(e.1, n));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Ok(WeightedGraph {
            n,
            edges,
            weights,
            adjacency,
        })
    }

    /// Convenience constructor with all weights equal to 1.
    pub fn unit_weights(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        Self::new(n, edges, vec![F::one(); n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted `(i, j)` pairs with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> F {
        self.weights[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges.binary_search(&(a, b)).is_ok()
    }

    /// Total weight of a vertex set.
    pub fn set_weight(&self, set: &[usize]) -> F {
        set.iter().map(|&v| self.weights[v]).sum()
    }

    /// True when no two vertices of `set` are adjacent.
    pub fn is_stable(&self, set: &[usize]) -> bool {
        for (idx, &i) in set.iter().enumerate() {
            for &j in &set[idx + 1..] {
                if self.has_edge(i, j) {
                    return false;
                }
            }
        }
        true
    }

    /// True when every weight is an integer (used to decide whether the
    /// relaxation bound may be rounded down).
    pub fn integral_weights(&self) -> bool {
        self.weights.iter().all(|w| w.fract() == F::zero())
    }
}

/// Parses the DIMACS ASCII format:
///
/// ```text
/// c <comment>
/// p edge <n> <m>
/// n <i> <w>      (optional vertex weight, 1-based; default 1)
/// e <i> <j>      (1-based endpoints)
/// ```
///
/// Unknown line types, malformed fields, out-of-range endpoints and
/// duplicate edges are all reported with their line number.
pub fn parse_dimacs<F: Real>(text: &str) -> Result<WeightedGraph<F>, DimacsError> {
    let mut n: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut weights: Vec<Option<F>> = Vec::new();

    let parse_err = |line: usize, msg: &str| DimacsError::Parse {
        line,
        msg: msg.to_string(),
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next().unwrap() {
            "c" => {}
            "p" => {
                if n.is_some() {
                    return Err(parse_err(line_no, "duplicate problem line"));
                }
                if tok.next() != Some("edge") {
                    return Err(parse_err(line_no, "expected \"p edge <n> <m>\""));
                }
                let nv: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "invalid vertex count"))?;
                let ne: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "invalid edge count"))?;
                if nv == 0 {
                    return Err(parse_err(line_no, "vertex count must be positive"));
                }
                weights = vec![None; nv];
                n = Some((nv, ne));
            }
            "e" => {
                let (nv, _) = n.ok_or_else(|| parse_err(line_no, "edge before problem line"))?;
                let i: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "invalid edge endpoint"))?;
                let j: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "invalid edge endpoint"))?;
                for v in [i, j] {
                    if v == 0 || v > nv {
                        return Err(DimacsError::Range {
                            line: line_no,
                            vertex: v,
                            n: nv,
                        });
                    }
                }
                if i == j {
                    return Err(parse_err(line_no, "self-loop"));
                }
                let (a, b) = if i < j { (i - 1, j - 1) } else { (j - 1, i - 1) };
                if edges.contains(&(a, b)) {
                    return Err(DimacsError::DuplicateEdge {
                        line: line_no,
                        i: a + 1,
                        j: b + 1,
                    });
                }
                edges.push((a, b));
            }
            "n" => {
                let (nv, _) = n.ok_or_else(|| parse_err(line_no, "weight before problem line"))?;
                let i: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "invalid weight vertex"))?;
                if i == 0 || i > nv {
                    return Err(DimacsError::Range {
                        line: line_no,
                        vertex: i,
                        n: nv,
                    });
                }
                let w: f64 = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "invalid weight value"))?;
                if weights[i - 1].is_some() {
                    return Err(parse_err(line_no, "duplicate weight line"));
                }
                if !w.is_finite() || w <= 0.0 {
                    return Err(parse_err(line_no, "weight must be positive and finite"));
                }
                weights[i - 1] = Some(F::from_f64(w));
            }
            other => {
                return Err(parse_err(line_no, &format!("unknown line type \"{other}\"")));
            }
        }
    }

    let (nv, ne) = n.ok_or(DimacsError::MissingProblemLine)?;
    if edges.len() != ne {
        return Err(DimacsError::EdgeCount {
            expected: ne,
            got: edges.len(),
        });
    }
    let weights: Vec<F> = weights.into_iter().map(|w| w.unwrap_or_else(F::one)).collect();
    Ok(WeightedGraph::new(nv, edges, weights)?)
}

/// Writes the DIMACS form read back by [`parse_dimacs`]; round-trips
/// exactly (weights are printed with shortest-round-trip formatting).
pub fn write_dimacs<F: Real>(g: &WeightedGraph<F>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p edge {} {}", g.n(), g.m());
    for (i, &w) in g.weights().iter().enumerate() {
        let _ = writeln!(out, "n {} {}", i + 1, w);
    }
    for &(i, j) in g.edges() {
        let _ = writeln!(out, "e {} {}", i + 1, j + 1);
    }
    out
}

/// Random instance in the style of the `gNNNdDDD` family: every unordered
/// pair becomes an edge independently with probability `density`, and each
/// weight is drawn uniformly from the integers `1..=n`.
///
/// Deterministic for a fixed `(n, density, seed)` triple.
pub fn gen_random_graph<F: Real>(
    n: usize,
    density: f64,
    seed: u64,
) -> Result<WeightedGraph<F>, GraphError> {
    if !(0.0..=1.0).contains(&density) {
        return Err(GraphError::InvalidDensity(density));
    }
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<F> = (0..n)
        .map(|_| F::from_usize(rng.gen_range(1..=n)))
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    WeightedGraph::new(n, edges, weights)
}

/// Cycle graph C_n with unit weights.
pub fn cycle_graph<F: Real>(n: usize) -> WeightedGraph<F> {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
    WeightedGraph::unit_weights(n, edges).expect("valid cycle")
}

/// Complete graph K_n with unit weights.
pub fn complete_graph<F: Real>(n: usize) -> WeightedGraph<F> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j));
        }
    }
    WeightedGraph::unit_weights(n, edges).expect("valid complete graph")
}
