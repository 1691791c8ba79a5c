//! Influence-based network centralities for stochastic diffusion models.
//!
//! The crate covers degree, harmonic, reachability, sphere-of-influence and
//! closeness centralities in individual, group and Shapley form, computed
//! either exactly (by enumerating the randomness of small triggering models)
//! or approximately with the two-phase RR-set estimator in [`estimator`].
//! The [`profile`] module exposes the influence-profile vector space and the
//! layered-graph basis used to reason about these measures on small vertex
//! sets.

pub mod cascade;
pub mod centrality;
pub mod edgelist;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod model;
pub mod profile;
pub mod report;
pub mod rng;
pub mod rr;

pub use cascade::{
    bfs_instance_sequence, sample_live_edge_graph, simulate_cascade, validate_sequence,
    CascadingSequence, SequenceViolation,
};
pub use centrality::{
    check_anonymity, check_bayesian, exact_influence_centrality, graph_centrality,
    CentralityMode, DistanceFunction, NodeWiseFunction,
};
pub use edgelist::{parse_edge_list, EdgeList, EdgeListFormat};
pub use error::{Error, Result};
pub use estimator::{estimate, EstimationMode, EstimationTrace, EstimatorConfig};
pub use graph::{bfs_distances, build_layered_graph, DirectedGraph, Distance, DistanceVector, LayeredGraphSpec};
pub use model::{ModelKind, TriggerDistribution, TriggeringModel};
pub use report::{CentralityReport, Method, ReportKey};
pub use rng::RngStream;
pub use rr::{rr_group_contribution, rr_individual_contribution, rr_shapley_values, sample_rr_set, RRSet};

/// Dense node identifier, `0..n`.
pub type NodeId = usize;

#[cfg(test)]
pub(crate) mod test_fixtures {
    use crate::graph::LayeredGraphSpec;

    /// Four layers of sizes (2, 3, 2, 3) on ten nodes.
    pub fn four_layers() -> LayeredGraphSpec {
        LayeredGraphSpec::new(10, vec![vec![0, 1], vec![2, 3, 4], vec![5, 6], vec![7, 8, 9]]).unwrap()
    }
}
