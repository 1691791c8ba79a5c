//! Triggering models: IC, LT and explicit per-node triggering-set distributions.

use std::io::BufRead;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{check_permutation, DirectedGraph};
use crate::rng::WorldKey;
use crate::NodeId;

/// Largest in-degree for which an explicit distribution may be stored.
pub const MAX_EXPLICIT_IN_DEGREE: usize = 20;

/// Default cap on the joint support enumerated by the exact oracles.
pub const DEFAULT_WORLD_CAP: usize = 1 << 16;

const LT_SUM_TOLERANCE: f64 = 1e-12;
const DISTRIBUTION_SUM_TOLERANCE: f64 = 1e-9;

/// A finite distribution over triggering sets of one node.
#[derive(Clone, Debug, PartialEq)]
pub struct TriggerDistribution {
    outcomes: Vec<(Vec<NodeId>, f64)>,
    cumulative: Vec<f64>,
}

impl TriggerDistribution {
    pub fn new(outcomes: Vec<(Vec<NodeId>, f64)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidModel("empty triggering-set distribution".into()));
        }
        let mut outcomes = outcomes;
        let mut total = 0.0;
        for (set, p) in outcomes.iter_mut() {
            if !(*p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidModel(format!("negative or non-finite probability {p}")));
            }
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidModel(format!("repeated node in triggering set {set:?}")));
            }
            total += *p;
        }
        if (total - 1.0).abs() > DISTRIBUTION_SUM_TOLERANCE {
            return Err(Error::InvalidModel(format!("probabilities sum to {total}, not 1")));
        }
        let mut sets: Vec<&Vec<NodeId>> = outcomes.iter().map(|(s, _)| s).collect();
        sets.sort();
        if sets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidModel("a triggering set is listed twice".into()));
        }
        let mut acc = 0.0;
        let cumulative = outcomes
            .iter()
            .map(|(_, p)| {
                acc += p / total;
                acc
            })
            .collect();
        Ok(TriggerDistribution { outcomes, cumulative })
    }

    /// Point mass on one set.
    pub fn certain(set: Vec<NodeId>) -> Self {
        TriggerDistribution::new(vec![(set, 1.0)]).expect("point mass is valid")
    }

    pub fn outcomes(&self) -> &[(Vec<NodeId>, f64)] {
        &self.outcomes
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[NodeId] {
        let r: f64 = rng.gen();
        let i = self.cumulative.partition_point(|&c| c <= r).min(self.outcomes.len() - 1);
        &self.outcomes[i].0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    /// Activation probability of every edge, aligned with `in_neighbors(v)`.
    IndependentCascade { probs: Vec<Vec<f64>> },
    /// Influence weight of every edge, aligned with `in_neighbors(v)`.
    LinearThreshold { weights: Vec<Vec<f64>> },
    /// A stored distribution per node.
    Explicit { dists: Vec<TriggerDistribution> },
}

/// A graph plus the law of every node's random triggering set.
#[derive(Clone, Debug, PartialEq)]
pub struct TriggeringModel {
    graph: DirectedGraph,
    kind: ModelKind,
}

fn per_in_edge(graph: &DirectedGraph, edge_values: &[f64]) -> Result<Vec<Vec<f64>>> {
    if edge_values.len() != graph.edge_count() {
        return Err(Error::DimensionMismatch { expected: graph.edge_count(), found: edge_values.len() });
    }
    let mut out: Vec<Vec<f64>> = (0..graph.node_count()).map(|v| Vec::with_capacity(graph.in_neighbors(v).len())).collect();
    // `from_edges` pushes in-neighbors in edge order, so a per-node cursor lines them up.
    for (&(_, v), &w) in graph.edges().iter().zip(edge_values) {
        out[v].push(w);
    }
    Ok(out)
}

impl TriggeringModel {
    /// IC model; `edge_probs` follows `graph.edges()` order.
    pub fn independent_cascade(graph: DirectedGraph, edge_probs: &[f64]) -> Result<Self> {
        if let Some(p) = edge_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidModel(format!("IC probability {p} outside [0, 1]")));
        }
        let probs = per_in_edge(&graph, edge_probs)?;
        Ok(TriggeringModel { graph, kind: ModelKind::IndependentCascade { probs } })
    }

    pub fn independent_cascade_uniform(graph: DirectedGraph, p: f64) -> Result<Self> {
        let probs = vec![p; graph.edge_count()];
        TriggeringModel::independent_cascade(graph, &probs)
    }

    /// IC with every edge certain: the deterministic BFS instance of `graph`.
    pub fn bfs_instance(graph: DirectedGraph) -> Self {
        TriggeringModel::independent_cascade_uniform(graph, 1.0).expect("p = 1 is a valid probability")
    }

    /// LT model; `edge_weights` follows `graph.edges()` order.
    pub fn linear_threshold(graph: DirectedGraph, edge_weights: &[f64]) -> Result<Self> {
        if let Some(w) = edge_weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::InvalidModel(format!("LT weight {w} outside [0, 1]")));
        }
        let weights = per_in_edge(&graph, edge_weights)?;
        for (v, ws) in weights.iter().enumerate() {
            let sum: f64 = ws.iter().sum();
            if sum > 1.0 + LT_SUM_TOLERANCE {
                return Err(Error::InvalidModel(format!("incoming LT weights of node {v} sum to {sum} > 1")));
            }
        }
        Ok(TriggeringModel { graph, kind: ModelKind::LinearThreshold { weights } })
    }

    /// LT with weight `1 / in-degree` on every edge.
    pub fn linear_threshold_uniform(graph: DirectedGraph) -> Self {
        let weights: Vec<f64> = graph
            .edges()
            .iter()
            .map(|&(_, v)| 1.0 / graph.in_neighbors(v).len() as f64)
            .collect();
        TriggeringModel::linear_threshold(graph, &weights).expect("uniform LT weights sum to 1")
    }

    pub fn explicit(graph: DirectedGraph, dists: Vec<TriggerDistribution>) -> Result<Self> {
        if dists.len() != graph.node_count() {
            return Err(Error::DimensionMismatch { expected: graph.node_count(), found: dists.len() });
        }
        for (v, dist) in dists.iter().enumerate() {
            let preds = graph.in_neighbors(v);
            if preds.len() > MAX_EXPLICIT_IN_DEGREE {
                return Err(Error::TooLarge(format!(
                    "node {v} has in-degree {} > {MAX_EXPLICIT_IN_DEGREE} for an explicit distribution",
                    preds.len()
                )));
            }
            for (set, _) in dist.outcomes() {
                if let Some(u) = set.iter().find(|u| !preds.contains(u)) {
                    return Err(Error::InvalidModel(format!("node {u} in a triggering set of {v} is not an in-neighbor")));
                }
            }
        }
        Ok(TriggeringModel { graph, kind: ModelKind::Explicit { dists } })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Draws `T(v)` into `out` (cleared first).
    pub fn sample_triggering_set<R: Rng + ?Sized>(&self, v: NodeId, rng: &mut R, out: &mut Vec<NodeId>) {
        out.clear();
        let preds = self.graph.in_neighbors(v);
        match &self.kind {
            ModelKind::IndependentCascade { probs } => {
                for (&u, &p) in preds.iter().zip(&probs[v]) {
                    if rng.gen::<f64>() < p {
                        out.push(u);
                    }
                }
            }
            ModelKind::LinearThreshold { weights } => {
                let r: f64 = rng.gen();
                let mut acc = 0.0;
                for (&u, &w) in preds.iter().zip(&weights[v]) {
                    acc += w;
                    if r < acc {
                        out.push(u);
                        break;
                    }
                }
            }
            ModelKind::Explicit { dists } => out.extend_from_slice(dists[v].sample(rng)),
        }
    }

    /// `T(v)` in the live-edge realization named by `world`.
    pub fn triggering_set_in_world(&self, world: WorldKey, v: NodeId, out: &mut Vec<NodeId>) {
        let mut rng = world.node_rng(v);
        self.sample_triggering_set(v, &mut rng, out);
    }

    /// Exact law of `T(v)`, zero-probability outcomes dropped.
    pub fn triggering_distribution(&self, v: NodeId) -> Vec<(Vec<NodeId>, f64)> {
        let preds = self.graph.in_neighbors(v);
        match &self.kind {
            ModelKind::IndependentCascade { probs } => {
                let mut out: Vec<(Vec<NodeId>, f64)> = vec![(Vec::new(), 1.0)];
                for (&u, &p) in preds.iter().zip(&probs[v]) {
                    if p == 0.0 {
                        continue;
                    }
                    if p == 1.0 {
                        for (set, _) in out.iter_mut() {
                            set.push(u);
                        }
                        continue;
                    }
                    let mut next = Vec::with_capacity(out.len() * 2);
                    for (set, q) in out {
                        let mut with = set.clone();
                        with.push(u);
                        next.push((with, q * p));
                        next.push((set, q * (1.0 - p)));
                    }
                    out = next;
                }
                out
            }
            ModelKind::LinearThreshold { weights } => {
                let mut out = Vec::new();
                let mut rest = 1.0;
                for (&u, &w) in preds.iter().zip(&weights[v]) {
                    if w > 0.0 {
                        out.push((vec![u], w));
                    }
                    rest -= w;
                }
                if rest > LT_SUM_TOLERANCE {
                    out.push((Vec::new(), rest));
                }
                out
            }
            ModelKind::Explicit { dists } => {
                dists[v].outcomes().iter().filter(|(_, p)| *p > 0.0).cloned().collect()
            }
        }
    }

    /// Number of joint live-edge outcomes with positive probability, or `None`
    /// once it exceeds `cap`.
    pub fn world_count(&self, cap: usize) -> Option<usize> {
        let mut count: usize = 1;
        for v in 0..self.node_count() {
            count = count.checked_mul(self.triggering_distribution(v).len())?;
            if count > cap {
                return None;
            }
        }
        Some(count)
    }

    /// Calls `visit(live_edge_graph, probability)` for every joint outcome of
    /// the triggering sets with positive probability.
    pub fn for_each_world<F>(&self, cap: usize, mut visit: F) -> Result<()>
    where
        F: FnMut(&DirectedGraph, f64),
    {
        let n = self.node_count();
        if self.world_count(cap).is_none() {
            return Err(Error::TooLarge(format!(
                "the model has more than {cap} live-edge outcomes; exact enumeration is infeasible"
            )));
        }
        let dists: Vec<Vec<(Vec<NodeId>, f64)>> = (0..n).map(|v| self.triggering_distribution(v)).collect();
        let mut digits = vec![0usize; n];
        loop {
            let mut p = 1.0;
            let in_sets: Vec<Vec<NodeId>> = (0..n)
                .map(|v| {
                    let (set, q) = &dists[v][digits[v]];
                    p *= q;
                    set.clone()
                })
                .collect();
            visit(&DirectedGraph::from_in_sets_unchecked(&in_sets), p);
            // mixed-radix increment
            let mut v = 0;
            loop {
                if v == n {
                    return Ok(());
                }
                digits[v] += 1;
                if digits[v] < dists[v].len() {
                    break;
                }
                digits[v] = 0;
                v += 1;
            }
        }
    }

    /// The same model stored as explicit per-node distributions.
    pub fn to_explicit(&self) -> Result<TriggeringModel> {
        let dists = (0..self.node_count())
            .map(|v| TriggerDistribution::new(self.triggering_distribution(v)))
            .collect::<Result<Vec<_>>>()?;
        TriggeringModel::explicit(self.graph.clone(), dists)
    }

    /// Model on the relabeled graph where node `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[NodeId]) -> Result<TriggeringModel> {
        check_permutation(perm, self.node_count())?;
        let graph = self.graph.relabel(perm)?;
        // Edge order is preserved by `relabel`, so per-edge vectors carry over.
        let edge_values = |per_node: &Vec<Vec<f64>>| -> Vec<f64> {
            let mut cursor = vec![0usize; self.node_count()];
            self.graph
                .edges()
                .iter()
                .map(|&(_, v)| {
                    let w = per_node[v][cursor[v]];
                    cursor[v] += 1;
                    w
                })
                .collect()
        };
        match &self.kind {
            ModelKind::IndependentCascade { probs } => TriggeringModel::independent_cascade(graph, &edge_values(probs)),
            ModelKind::LinearThreshold { weights } => TriggeringModel::linear_threshold(graph, &edge_values(weights)),
            ModelKind::Explicit { dists } => {
                let mut new = vec![None; self.node_count()];
                for (v, dist) in dists.iter().enumerate() {
                    let outcomes = dist
                        .outcomes()
                        .iter()
                        .map(|(set, p)| (set.iter().map(|&u| perm[u]).collect(), *p))
                        .collect();
                    new[perm[v]] = Some(TriggerDistribution::new(outcomes)?);
                }
                TriggeringModel::explicit(graph, new.into_iter().map(|d| d.expect("perm is a bijection")).collect())
            }
        }
    }
}

/// Parses the explicit-model format, one node per line:
///
/// ```text
/// v : {subset} p {subset} p ...
/// ```
///
/// with subsets written as comma-joined ids, e.g. `2 : {0,1} 0.25 {1} 0.5 {} 0.25`.
/// Nodes without a line never activate through others (`T(v) = {}`). When
/// `graph` is `None` the graph is the union of all support sets.
pub fn parse_explicit_model<R: BufRead>(reader: R, graph: Option<&DirectedGraph>) -> Result<TriggeringModel> {
    let mut rows: Vec<(NodeId, Vec<(Vec<NodeId>, f64)>, usize)> = Vec::new();
    let mut max_id = 0usize;
    let mut any = false;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: lineno, message };
        let (head, rest) = content.split_once(':').ok_or_else(|| err("missing `:` after node id".into()))?;
        let v: NodeId = head.trim().parse().map_err(|_| err(format!("invalid node id `{}`", head.trim())))?;
        let mut outcomes = Vec::new();
        let mut rest = rest.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(|| err(format!("expected `{{` at `{rest}`")))?;
            let (inside, after) = body.split_once('}').ok_or_else(|| err("unterminated `{`".into()))?;
            let set = inside
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<NodeId>().map_err(|_| err(format!("invalid node id `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            let after = after.trim_start();
            let end = after.find(|c: char| c.is_whitespace()).unwrap_or(after.len());
            let p: f64 = after[..end].parse().map_err(|_| err(format!("invalid probability `{}`", &after[..end])))?;
            max_id = set.iter().copied().fold(max_id, usize::max);
            outcomes.push((set, p));
            rest = after[end..].trim_start();
        }
        if rows.iter().any(|(w, _, _)| *w == v) {
            return Err(err(format!("node {v} listed twice")));
        }
        max_id = max_id.max(v);
        any = true;
        rows.push((v, outcomes, lineno));
    }
    let n = match graph {
        Some(g) => g.node_count(),
        None if any => max_id + 1,
        None => 0,
    };
    let mut dists: Vec<Option<TriggerDistribution>> = vec![None; n];
    for (v, outcomes, lineno) in &rows {
        if *v >= n || outcomes.iter().any(|(s, _)| s.iter().any(|&u| u >= n)) {
            return Err(Error::Parse { line: *lineno, message: format!("node id out of range for {n} nodes") });
        }
        let dist = TriggerDistribution::new(outcomes.clone())
            .map_err(|e| Error::Parse { line: *lineno, message: e.to_string() })?;
        dists[*v] = Some(dist);
    }
    let dists: Vec<TriggerDistribution> =
        dists.into_iter().map(|d| d.unwrap_or_else(|| TriggerDistribution::certain(Vec::new()))).collect();
    let graph = match graph {
        Some(g) => g.clone(),
        None => {
            let in_sets: Vec<Vec<NodeId>> = dists
                .iter()
                .enumerate()
                .map(|(v, d)| {
                    let mut union: Vec<NodeId> = d.outcomes().iter().flat_map(|(s, _)| s.iter().copied()).collect();
                    union.sort_unstable();
                    union.dedup();
                    union.retain(|&u| u != v);
                    union
                })
                .collect();
            let edges: Vec<(NodeId, NodeId)> =
                in_sets.iter().enumerate().flat_map(|(v, s)| s.iter().map(move |&u| (u, v))).collect();
            DirectedGraph::from_edges(n, edges)?
        }
    };
    TriggeringModel::explicit(graph, dists)
}
