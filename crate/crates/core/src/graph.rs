//! Directed graphs, BFS distances and layered graphs.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Deref;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::NodeId;

/// Hop distance on the extended naturals. `Inf` orders after every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Inf,
}

impl Distance {
    pub const ZERO: Distance = Distance::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Inf => None,
        }
    }

    /// One step further, saturating at `Inf`.
    pub fn succ(self) -> Distance {
        match self {
            Distance::Finite(d) => Distance::Finite(d + 1),
            Distance::Inf => Distance::Inf,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Inf => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u32(*d),
            Distance::Inf => s.serialize_str("inf"),
        }
    }
}

/// Distances from a source set to every node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistanceVector(Vec<Distance>);

impl DistanceVector {
    pub fn new(d: Vec<Distance>) -> Self {
        DistanceVector(d)
    }

    pub fn into_inner(self) -> Vec<Distance> {
        self.0
    }

    /// CSV with header `node,distance`; unreachable nodes print `inf`.
    pub fn to_csv(&self, labels: Option<&[String]>) -> String {
        let mut out = String::from("node,distance\n");
        for (v, d) in self.0.iter().enumerate() {
            match labels {
                Some(l) => out.push_str(&format!("{},{}\n", l[v], d)),
                None => out.push_str(&format!("{v},{d}\n")),
            }
        }
        out
    }
}

impl Deref for DistanceVector {
    type Target = [Distance];

    fn deref(&self) -> &[Distance] {
        &self.0
    }
}

/// Simple directed graph on dense ids `0..n`, without self-loops or parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl DirectedGraph {
    /// Edgeless graph on `n` nodes.
    pub fn new(n: usize) -> Self {
        DirectedGraph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from an ordered edge list. Edge order is kept and is
    /// the order used by per-edge weight vectors.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = DirectedGraph::new(n);
        let mut seen = HashSet::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            g.out_adj[u].push(v);
            g.in_adj[v].push(u);
            g.edges.push((u, v));
        }
        Ok(g)
    }

    /// Graph with edges `(u, v)` for every `u` in `in_sets[v]`. Callers
    /// guarantee the sets are duplicate-free, in range and loop-free.
    pub(crate) fn from_in_sets_unchecked(in_sets: &[Vec<NodeId>]) -> Self {
        let n = in_sets.len();
        let mut g = DirectedGraph::new(n);
        for (v, set) in in_sets.iter().enumerate() {
            for &u in set {
                g.out_adj[u].push(v);
                g.in_adj[v].push(u);
                g.edges.push((u, v));
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_adj[u].contains(&v)
    }

    /// Same graph with node `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[NodeId]) -> Result<Self> {
        check_permutation(perm, self.node_count())?;
        DirectedGraph::from_edges(
            self.node_count(),
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
        )
    }

    pub(crate) fn check_node(&self, v: NodeId) -> Result<()> {
        if v >= self.node_count() {
            return Err(Error::NodeOutOfRange { node: v, n: self.node_count() });
        }
        Ok(())
    }
}

pub(crate) fn check_permutation(perm: &[NodeId], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidConfig(format!("not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Multi-source BFS: `d[u] = min over sources s of d_G(s, u)`.
pub fn bfs_distances(g: &DirectedGraph, sources: &[NodeId]) -> Result<DistanceVector> {
    if sources.is_empty() {
        return Err(Error::EmptySources);
    }
    for &s in sources {
        g.check_node(s)?;
    }
    Ok(DistanceVector(bfs_unchecked(g, sources.iter().copied())))
}

pub(crate) fn bfs_unchecked<I>(g: &DirectedGraph, sources: I) -> Vec<Distance>
where
    I: IntoIterator<Item = NodeId>,
{
    let mut dist = vec![Distance::Inf; g.node_count()];
    let mut queue = VecDeque::new();
    for s in sources {
        if dist[s] == Distance::Inf {
            dist[s] = Distance::ZERO;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u].succ();
        for &w in g.out_neighbors(u) {
            if dist[w] == Distance::Inf {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS from the members of a bitmask (node `i` is bit `i`).
pub(crate) fn bfs_from_mask(g: &DirectedGraph, mask: u64) -> Vec<Distance> {
    bfs_unchecked(g, (0..g.node_count()).filter(|&v| mask >> v & 1 == 1))
}

/// Layers `R_0, ..., R_t` of a layered graph on `n` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LayeredGraphSpec {
    n: usize,
    layers: Vec<Vec<NodeId>>,
}

impl LayeredGraphSpec {
    pub fn new(n: usize, mut layers: Vec<Vec<NodeId>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidLayers("at least one layer is required".into()));
        }
        let mut seen = vec![false; n];
        for (i, layer) in layers.iter_mut().enumerate() {
            if layer.is_empty() {
                return Err(Error::InvalidLayers(format!("layer {i} is empty")));
            }
            layer.sort_unstable();
            for &v in layer.iter() {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidLayers(format!("node {v} appears in more than one layer")));
                }
            }
        }
        Ok(LayeredGraphSpec { n, layers })
    }

    /// The null instance: every node in a single layer, no edges.
    pub fn null(n: usize) -> Self {
        LayeredGraphSpec { n, layers: vec![(0..n).collect()] }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> &[Vec<NodeId>] {
        &self.layers
    }

    /// Index of the last layer, `t`.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn is_null(&self) -> bool {
        self.depth() == 0
    }

    /// Activation times of the BFS sequence seeded by the whole first layer.
    pub fn layer_times(&self) -> Vec<Distance> {
        let mut times = vec![Distance::Inf; self.n];
        for (i, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                times[v] = Distance::Finite(i as u32);
            }
        }
        times
    }

    pub fn relabel(&self, perm: &[NodeId]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        LayeredGraphSpec::new(
            self.n,
            self.layers.iter().map(|l| l.iter().map(|&v| perm[v]).collect()).collect(),
        )
    }
}

impl fmt::Display for LayeredGraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .layers
            .iter()
            .map(|l| {
                let ids: Vec<String> = l.iter().map(|v| v.to_string()).collect();
                format!("{{{}}}", ids.join(","))
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Complete bipartite connections `R_{i-1} -> R_i`; every other node is isolated.
pub fn build_layered_graph(spec: &LayeredGraphSpec) -> DirectedGraph {
    let edges = spec
        .layers
        .windows(2)
        .flat_map(|w| w[0].iter().flat_map(move |&u| w[1].iter().map(move |&v| (u, v))));
    DirectedGraph::from_edges(spec.n, edges).expect("layer invariants rule out loops and duplicates")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::four_layers;
    use proptest::prelude::*;

    fn f(d: u32) -> Distance {
        Distance::Finite(d)
    }

    #[test]
    fn four_layers_bfs_from_first_node() {
        let g = build_layered_graph(&four_layers());
        let d = bfs_distances(&g, &[0]).unwrap();
        assert_eq!(&*d, &[f(0), Distance::Inf, f(1), f(1), f(1), f(2), f(2), f(3), f(3), f(3)]);
    }

    #[test]
    fn four_layers_edge_count() {
        assert_eq!(build_layered_graph(&four_layers()).edge_count(), 18);
        assert_eq!(build_layered_graph(&LayeredGraphSpec::null(5)).edge_count(), 0);
    }

    #[test]
    fn overlapping_or_empty_layers_rejected() {
        assert!(matches!(LayeredGraphSpec::new(2, vec![vec![0], vec![0]]), Err(Error::InvalidLayers(_))));
        assert!(matches!(LayeredGraphSpec::new(2, vec![vec![0], vec![]]), Err(Error::InvalidLayers(_))));
        assert!(matches!(LayeredGraphSpec::new(2, vec![vec![0], vec![2]]), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn edgeless_and_all_sources() {
        let g = DirectedGraph::new(4);
        assert_eq!(&*bfs_distances(&g, &[0]).unwrap(), &[f(0), Distance::Inf, Distance::Inf, Distance::Inf]);
        let g = build_layered_graph(&four_layers());
        let all: Vec<_> = (0..10).collect();
        assert!(bfs_distances(&g, &all).unwrap().iter().all(|&d| d == Distance::ZERO));
        assert!(matches!(bfs_distances(&g, &[]), Err(Error::EmptySources)));
    }

    #[test]
    fn graph_construction_errors() {
        assert!(matches!(DirectedGraph::from_edges(2, [(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(DirectedGraph::from_edges(2, [(0, 1), (0, 1)]), Err(Error::DuplicateEdge(0, 1))));
        assert!(matches!(DirectedGraph::from_edges(2, [(0, 2)]), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn distance_csv_uses_inf_literal() {
        let d = bfs_distances(&DirectedGraph::from_edges(3, [(0, 1)]).unwrap(), &[0]).unwrap();
        assert_eq!(d.to_csv(None), "node,distance\n0,0\n1,1\n2,inf\n");
    }

    fn arb_graph() -> impl Strategy<Value = DirectedGraph> {
        (1usize..9).prop_flat_map(|n| {
            proptest::collection::btree_set((0..n, 0..n), 0..(n * n))
                .prop_map(move |es| DirectedGraph::from_edges(n, es.into_iter().filter(|(u, v)| u != v)).unwrap())
        })
    }

    proptest! {
        #[test]
        fn adjacency_lists_agree(g in arb_graph()) {
            for u in 0..g.node_count() {
                for &v in g.out_neighbors(u) {
                    prop_assert!(g.in_neighbors(v).contains(&u));
                }
                for &w in g.in_neighbors(u) {
                    prop_assert!(g.out_neighbors(w).contains(&u));
                }
            }
        }

        #[test]
        fn bfs_is_idempotent_and_monotone_in_sources(g in arb_graph(), a in 0usize..64, b in 0usize..64) {
            let n = g.node_count();
            let s = vec![a % n];
            let d1 = bfs_distances(&g, &s).unwrap();
            prop_assert_eq!(&d1, &bfs_distances(&g, &s).unwrap());
            let d2 = bfs_distances(&g, &[a % n, b % n]).unwrap();
            for u in 0..n {
                prop_assert!(d2[u] <= d1[u]);
            }
            // every finite non-zero distance has a predecessor one step closer
            for u in 0..n {
                if let Distance::Finite(t) = d1[u] {
                    if t > 0 {
                        prop_assert!(g.in_neighbors(u).iter().any(|&w| d1[w] == Distance::Finite(t - 1)));
                    }
                }
            }
        }

        #[test]
        fn layered_bfs_assigns_layer_index(sizes in proptest::collection::vec(1usize..3, 2..5), pick in 1u64..4) {
            let mut layers = Vec::new();
            let mut next = 0;
            for s in &sizes {
                layers.push((next..next + s).collect::<Vec<_>>());
                next += s;
            }
            let n = next + 1;
            let spec = LayeredGraphSpec::new(n, layers.clone()).unwrap();
            let g = build_layered_graph(&spec);
            let seeds: Vec<_> = layers[0].iter().copied().enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1).map(|(_, v)| v).collect();
            prop_assume!(!seeds.is_empty());
            let d = bfs_distances(&g, &seeds).unwrap();
            for (i, layer) in layers.iter().enumerate().skip(1) {
                for &v in layer {
                    prop_assert_eq!(d[v], Distance::Finite(i as u32));
                }
            }
            prop_assert_eq!(d[n - 1], Distance::Inf);
        }
    }
}
