//! Conductance-based community search.
//!
//! Given an undirected graph and a query vertex, find a connected vertex set
//! containing the query whose conductance is small. Two searches are provided:
//!
//! * [`pprcs_search`]: forward-push personalized PageRank followed by a sweep
//!   over the degree-normalised scores that only accepts connected prefixes.
//! * [`sccs_search`]: BFS sampling around the query, a maximum clique seed,
//!   then alternating gain-driven expansion and boundary verification.
//!
//! The cut arithmetic in [`metrics`] is generic over the [`Scalar`] type so the
//! same formulas can be evaluated in `f32`, `f64` or exact [`Rational`]s.

pub mod clique;
pub mod error;
pub mod eval;
pub mod graph;
pub mod metrics;
pub mod oracle;
pub mod ppr;
pub mod sampler;
pub mod scalar;
pub mod sccs;
mod union_find;

pub use error::{Error, Result};
pub use eval::{
    evaluate_query, f1_score, generate_planted_partition, load_ground_truth, select_queries,
    planted_partition, Algorithm, EvalReport, EvalSummary, F1Score, GroundTruth, PlantedPartition,
    QuerySpec,
};
pub use graph::{bfs_depths, load_edge_list, induced_subgraph, is_connected_subset, DepthMap, Graph, VertexId};
pub use metrics::{
    batch_stats_add, batch_stats_remove, conductance, CutCounts, gain_add, gain_remove, quality_after_add,
    quality_after_remove, quality_score, subgraph_conductance, BatchStats, Community,
};
pub use oracle::{brute_force_ccs, OracleResult};
pub use ppr::{forward_push, pprcs_search, PprParams, PprState};
pub use sampler::{sample_subgraph, SampledSubgraph, SamplingParams};
pub use scalar::Scalar;
pub use sccs::{
    expansion, initial_community, sccs_search, sccs_search_traced, verification, SccsParams,
    SccsTrace, TraceEvent,
};

/// Exact rational scalar used by the oracle and by exact-arithmetic checks.
pub type Rational = num_rational::Ratio<i64>;

/// Double-precision forward-push parameters (the common case).
pub type PprParams64 = PprParams<f64>;
/// Double-precision forward-push state.
pub type PprState64 = PprState<f64>;
/// Single-precision forward-push parameters.
pub type PprParams32 = PprParams<f32>;
/// Single-precision forward-push state.
pub type PprState32 = PprState<f32>;
