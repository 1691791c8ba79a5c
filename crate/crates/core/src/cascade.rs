//! Cascading sequences: forward simulation, the deterministic BFS instance,
//! live-edge sampling and validity checks.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{bfs_unchecked, DirectedGraph, Distance};
use crate::model::TriggeringModel;
use crate::rng::RngStream;
use crate::NodeId;

/// A monotone sequence `S_0 ⊆ S_1 ⊆ ... ⊆ S_{n-1}` stored as the activation
/// time (cascading distance) of every node; `S_t = {u : time[u] <= t}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CascadingSequence {
    times: Vec<Distance>,
}

impl CascadingSequence {
    pub fn from_times(times: Vec<Distance>) -> Self {
        CascadingSequence { times }
    }

    pub fn times(&self) -> &[Distance] {
        &self.times
    }

    pub fn node_count(&self) -> usize {
        self.times.len()
    }

    pub fn seed_set(&self) -> Vec<NodeId> {
        self.set_at(0)
    }

    /// `S_t`.
    pub fn set_at(&self, t: u32) -> Vec<NodeId> {
        self.times
            .iter()
            .enumerate()
            .filter(|(_, d)| **d <= Distance::Finite(t))
            .map(|(v, _)| v)
            .collect()
    }

    /// `(S_0, ..., S_{n-1})`.
    pub fn sets(&self) -> Vec<Vec<NodeId>> {
        (0..self.node_count().max(1) as u32).map(|t| self.set_at(t)).collect()
    }

    /// Last step at which a node activates.
    pub fn horizon(&self) -> u32 {
        self.times.iter().filter_map(|d| d.finite()).max().unwrap_or(0)
    }

    /// `S_0 = S_1 = ... = S_{n-1}`.
    pub fn is_stationary(&self) -> bool {
        self.horizon() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceViolation {
    LengthMismatch { expected: usize, found: usize },
    EmptySeed,
    TimeOutOfRange { node: NodeId, time: u32 },
    /// Node activated at `step` without an in-neighbor activated at `step - 1`.
    NotContinuous { node: NodeId, step: u32 },
}

impl fmt::Display for SequenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceViolation::LengthMismatch { expected, found } => {
                write!(f, "sequence covers {found} nodes, graph has {expected}")
            }
            SequenceViolation::EmptySeed => f.write_str("seed set S_0 is empty"),
            SequenceViolation::TimeOutOfRange { node, time } => {
                write!(f, "node {node} activates at step {time}, beyond the last step")
            }
            SequenceViolation::NotContinuous { node, step } => write!(
                f,
                "node {node} activates at step {step} without an in-neighbor activated at step {}",
                step - 1
            ),
        }
    }
}

/// Checks monotonicity and G-continuity: every node of `Δ_t` has an in-edge
/// from `Δ_{t-1}`. Reports the first violation in node order.
pub fn validate_sequence(g: &DirectedGraph, seq: &CascadingSequence) -> Result<(), SequenceViolation> {
    let n = g.node_count();
    if seq.node_count() != n {
        return Err(SequenceViolation::LengthMismatch { expected: n, found: seq.node_count() });
    }
    if !seq.times.contains(&Distance::ZERO) {
        return Err(SequenceViolation::EmptySeed);
    }
    for (v, &d) in seq.times.iter().enumerate() {
        let Distance::Finite(t) = d else { continue };
        if t as usize >= n {
            return Err(SequenceViolation::TimeOutOfRange { node: v, time: t });
        }
        if t > 0 && !g.in_neighbors(v).iter().any(|&u| seq.times[u] == Distance::Finite(t - 1)) {
            return Err(SequenceViolation::NotContinuous { node: v, step: t });
        }
    }
    Ok(())
}

fn check_seeds(n: usize, seeds: &[NodeId]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::EmptySources);
    }
    if let Some(&node) = seeds.iter().find(|&&s| s >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    Ok(())
}

/// The unique sequence of the BFS instance of `g`: `S_t` is everything within
/// distance `t` of the seeds.
pub fn bfs_instance_sequence(g: &DirectedGraph, seeds: &[NodeId]) -> Result<CascadingSequence> {
    check_seeds(g.node_count(), seeds)?;
    Ok(CascadingSequence { times: bfs_unchecked(g, seeds.iter().copied()) })
}

/// Samples every triggering set once and returns the live-edge graph
/// `{(u, v) : u ∈ T(v)}`.
pub fn sample_live_edge_graph(model: &TriggeringModel, rng: &mut RngStream) -> DirectedGraph {
    let world = rng.world();
    let in_sets: Vec<Vec<NodeId>> = (0..model.node_count())
        .map(|v| {
            let mut set = Vec::new();
            model.triggering_set_in_world(world, v, &mut set);
            set
        })
        .collect();
    DirectedGraph::from_in_sets_unchecked(&in_sets)
}

/// Forward diffusion from `seeds`. Triggering sets are drawn lazily, only for
/// nodes adjacent to an active node, from the same per-node streams that
/// [`sample_live_edge_graph`] would use for this `rng` state.
pub fn simulate_cascade(model: &TriggeringModel, seeds: &[NodeId], rng: &mut RngStream) -> Result<CascadingSequence> {
    let n = model.node_count();
    check_seeds(n, seeds)?;
    let world = rng.world();
    let g = model.graph();
    let mut times = vec![Distance::Inf; n];
    let mut triggers: Vec<Option<Vec<NodeId>>> = vec![None; n];
    let mut frontier: Vec<NodeId> = Vec::new();
    for &s in seeds {
        if times[s] == Distance::Inf {
            times[s] = Distance::ZERO;
            frontier.push(s);
        }
    }
    let mut step = 0u32;
    let mut next = Vec::new();
    while !frontier.is_empty() {
        step += 1;
        next.clear();
        for &u in &frontier {
            for &w in g.out_neighbors(u) {
                if times[w] != Distance::Inf {
                    continue;
                }
                let set = triggers[w].get_or_insert_with(|| {
                    let mut s = Vec::new();
                    model.triggering_set_in_world(world, w, &mut s);
                    s
                });
                if set.contains(&u) {
                    times[w] = Distance::Finite(step);
                    next.push(w);
                }
            }
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    Ok(CascadingSequence { times })
}
