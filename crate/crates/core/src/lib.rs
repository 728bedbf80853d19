//! Maximum-weight stable set solving by a hybrid of semidefinite and
//! constraint programming.
//!
//! The pipeline: solve the theta-number relaxation of the instance once,
//! rank vertices by the relaxation diagonal, greedily round to a first
//! feasible solution and a V0/V1 variable partition, then enumerate
//! subproblems in limited-discrepancy order and finish each with a CP
//! branch-and-bound under the incumbent cutoff. The certified relaxation
//! bound both prunes the search and proves optimality — frequently already
//! at discrepancy 0.
//!
//! Modules follow the pipeline: [`graph`] (instances and DIMACS I/O),
//! [`sdp`] (interior-point solver), [`theta`] (relaxation models and
//! scores), [`rounding`] (V0/V1 split), [`lds`] (subproblem streams),
//! [`cp`] (branch and bound), [`hybrid`] (the orchestration and bench
//! harness). Numeric code is generic over [`scalar::Real`] (`f32`/`f64`);
//! the crate-root aliases fix `f64` for ordinary use.

pub mod coding;
pub mod cp;
pub mod graph;
pub mod hybrid;
pub mod lds;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod rounding;
pub mod scalar;
pub mod sdp;
pub mod theta;

pub use graph::{gen_random_graph, parse_dimacs, write_dimacs, WeightedGraph};
pub use hybrid::{hybrid_solve, run_bench, HybridConfig, RunReport};
pub use scalar::Real;
pub use theta::{solve_theta, ThetaVariant};

/// Concrete `f64` aliases for the common case.
pub type Graph = graph::WeightedGraph<f64>;
pub type Partition = rounding::DomainPartition<f64>;
pub type Config = hybrid::HybridConfig<f64>;
pub type Report = hybrid::RunReport<f64>;
pub type Theta = theta::ThetaResult<f64>;
pub type CpOutcome = cp::CpResult<f64>;
