//! Reverse-reachable (RR) sets with per-node distance to the root.
//!
//! An RR set is grown by reverse BFS from a root `v`: sample `T(v)`, then the
//! triggering set of every newly reached node, once each. The BFS depth of
//! `u` is its distance to `v` in the sampled subgraph, `d_R(u, v)`.
//!
//! For an additive `f(d) = Σ g(d_u)` the RR set defines the coalition game
//! `S ↦ g(d_R(S, v))`. Its Shapley value depends only on the level sizes:
//! for `u` on level `k`, with `N = |R|` and `s_i` the number of members at
//! level `i` or deeper,
//!
//! ```text
//! φ_u = g(k)/N + Σ_{k<i≤Δ} (g(k) − g(i)) · (1/(N − s_i) − 1/(N − s_{i+1}))
//! ```
//!
//! where `1/(N − s_i)` is the probability that `u` precedes every member
//! closer than level `i`. The sum telescopes to
//! `g(k)/(N − s_{k+1}) − Σ_{k<i≤Δ} g(i)·w_i`, computed for all levels with one
//! suffix sum.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;

use crate::centrality::NodeWiseFunction;
use crate::error::{Error, Result};
use crate::graph::Distance;
use crate::model::TriggeringModel;
use crate::NodeId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RRSet {
    root: NodeId,
    /// Members in BFS order, so `dist` is non-decreasing.
    nodes: Vec<NodeId>,
    dist: Vec<u32>,
    level_sizes: Vec<usize>,
}

impl RRSet {
    /// Builds an RR set from explicit `(node, distance)` pairs.
    pub fn from_distances(root: NodeId, mut members: Vec<(NodeId, u32)>) -> Result<Self> {
        members.sort_by_key(|&(u, d)| (d, u));
        if members.first() != Some(&(root, 0)) || members.iter().filter(|(_, d)| *d == 0).count() != 1 {
            return Err(Error::InvalidConfig("an RR set has exactly its root at distance 0".into()));
        }
        let mut ids: Vec<NodeId> = members.iter().map(|(u, _)| *u).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig("repeated RR-set member".into()));
        }
        let delta = members.last().map_or(0, |(_, d)| *d) as usize;
        let mut level_sizes = vec![0; delta + 1];
        for &(_, d) in &members {
            level_sizes[d as usize] += 1;
        }
        if level_sizes.contains(&0) {
            return Err(Error::InvalidConfig("RR-set levels must be contiguous".into()));
        }
        let (nodes, dist) = members.into_iter().unzip();
        Ok(RRSet { root, nodes, dist, level_sizes })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Deepest level, `Δ`.
    pub fn depth(&self) -> u32 {
        (self.level_sizes.len() - 1) as u32
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.nodes.iter().copied().zip(self.dist.iter().copied())
    }

    pub fn distance_of(&self, u: NodeId) -> Distance {
        self.iter().find(|&(w, _)| w == u).map_or(Distance::Inf, |(_, d)| Distance::Finite(d))
    }

    /// `s_i = |{u : d(u) >= i}|` for `i = 0..=Δ+1`.
    pub fn suffix_counts(&self) -> Vec<usize> {
        suffix_counts(&self.level_sizes)
    }

    /// `root | u:dist,u:dist,...`
    pub fn dump_line(&self, labels: Option<&[String]>) -> String {
        let name = |v: NodeId| labels.map_or_else(|| v.to_string(), |l| l[v].clone());
        let mut s = format!("{} |", name(self.root));
        for (i, (u, d)) in self.iter().enumerate() {
            let sep = if i == 0 { " " } else { "," };
            let _ = write!(s, "{sep}{}:{d}", name(u));
        }
        s
    }
}

fn suffix_counts(level_sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![0; level_sizes.len() + 1];
    for i in (0..level_sizes.len()).rev() {
        s[i] = s[i + 1] + level_sizes[i];
    }
    s
}

/// Reusable RR-set generator; keeps its scratch buffers between samples.
pub struct RRSampler<'a> {
    model: &'a TriggeringModel,
    stamp: Vec<u32>,
    epoch: u32,
    queue: VecDeque<(NodeId, u32)>,
    trigger: Vec<NodeId>,
}

impl<'a> RRSampler<'a> {
    pub fn new(model: &'a TriggeringModel) -> Self {
        RRSampler {
            model,
            stamp: vec![0; model.node_count()],
            epoch: 0,
            queue: VecDeque::new(),
            trigger: Vec::new(),
        }
    }

    /// Samples one RR set; the root is uniform over `V` unless given.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R, root: Option<NodeId>) -> RRSet {
        let n = self.model.node_count();
        assert!(n > 0, "cannot sample an RR set on an empty graph");
        let root = root.unwrap_or_else(|| rng.gen_range(0..n));
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut nodes = Vec::new();
        let mut dist = Vec::new();
        let mut level_sizes: Vec<usize> = Vec::new();
        self.stamp[root] = self.epoch;
        self.queue.clear();
        self.queue.push_back((root, 0));
        while let Some((u, d)) = self.queue.pop_front() {
            nodes.push(u);
            dist.push(d);
            if level_sizes.len() <= d as usize {
                level_sizes.push(0);
            }
            level_sizes[d as usize] += 1;
            self.model.sample_triggering_set(u, rng, &mut self.trigger);
            for &w in &self.trigger {
                if self.stamp[w] != self.epoch {
                    self.stamp[w] = self.epoch;
                    self.queue.push_back((w, d + 1));
                }
            }
        }
        RRSet { root, nodes, dist, level_sizes }
    }
}

pub fn sample_rr_set<R: Rng + ?Sized>(model: &TriggeringModel, rng: &mut R, root: Option<NodeId>) -> RRSet {
    RRSampler::new(model).sample(rng, root)
}

/// `g(d_R(u, v))` for every member `u`; non-members contribute `g(inf) = 0`.
pub fn rr_individual_contribution(rr: &RRSet, g: NodeWiseFunction) -> Vec<(NodeId, f64)> {
    rr.iter().map(|(u, d)| (u, g.eval_level(d))).collect()
}

/// Shapley value of each level's members in the game `S ↦ g(d_R(S, v))`.
///
/// Shifting `g` by the constant `c = g(Δ)` moves `c/N` onto every member, so
/// the suffix sum runs over `g − c`; functions that are constant on the
/// deepest levels (reachability, a wide sphere) come out exact.
pub fn level_shapley(level_sizes: &[usize], g: NodeWiseFunction) -> Vec<f64> {
    let levels = level_sizes.len();
    if levels == 0 {
        return Vec::new();
    }
    let total = level_sizes.iter().sum::<usize>() as f64;
    let s = suffix_counts(level_sizes);
    // below[i] = N - s_i = members closer than level i
    let below = |i: usize| total - s[i] as f64;
    let c = g.eval_level(levels as u32 - 1);
    let shifted = |k: usize| g.eval_level(k as u32) - c;
    let mut phi = vec![0.0; levels];
    let mut tail = 0.0;
    for k in (0..levels).rev() {
        let own = shifted(k);
        phi[k] = c / total + if own == 0.0 { 0.0 } else { own / below(k + 1) } - tail;
        if k > 0 && own != 0.0 {
            tail += own * (1.0 / below(k) - 1.0 / below(k + 1));
        }
    }
    phi
}

/// Shapley value of every member in the game `S ↦ g(d_R(S, v))`, in O(|R|).
pub fn rr_shapley_values(rr: &RRSet, g: NodeWiseFunction) -> Vec<(NodeId, f64)> {
    let phi = level_shapley(&rr.level_sizes, g);
    rr.iter().map(|(u, d)| (u, phi[d as usize])).collect()
}

/// `g(d_R(S, v))`, with the minimum over members of `S` present in `R`.
pub fn rr_group_contribution(rr: &RRSet, g: NodeWiseFunction, group: &[NodeId]) -> f64 {
    // members are in non-decreasing distance order
    rr.iter().find(|(u, _)| group.contains(u)).map_or(0.0, |(_, d)| g.eval_level(d))
}
