//! Distance-based centralities: graph-theoretic forms on a fixed graph and
//! influence-based forms as expectations over a diffusion model.

mod axioms;
mod exact;
mod functions;
pub mod shapley;

pub use axioms::{check_anonymity, check_bayesian, AXIOM_TOLERANCE};
pub use exact::{
    exact_influence_centrality, exact_influence_centrality_with_cap, graph_centrality, MAX_GRAPH_PERMUTATION_NODES,
    MAX_INFLUENCE_PERMUTATION_NODES, SHAPLEY_FALLBACK_SAMPLES,
};
pub use functions::{DistanceFunction, NodeWiseFunction};

pub(crate) use exact::check_groups;

use crate::NodeId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CentralityMode {
    /// One value per node, seeded by that node alone.
    Individual,
    /// One value per query set.
    Group(Vec<Vec<NodeId>>),
    /// Shapley value of the group centrality game.
    Shapley,
}
