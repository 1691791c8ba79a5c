use std::collections::HashMap;

use super::shapley::{shapley_by_permutations, shapley_by_sampling};
use super::{CentralityMode, DistanceFunction, NodeWiseFunction};
use crate::error::{Error, Result};
use crate::graph::{bfs_from_mask, bfs_unchecked, DirectedGraph};
use crate::model::{TriggeringModel, DEFAULT_WORLD_CAP};
use crate::report::{CentralityReport, Method, ReportKey, ReportMode};
use crate::rng::RngStream;
use crate::rr::level_shapley;
use crate::NodeId;

/// Graph Shapley values enumerate all `n!` orders up to this size.
pub const MAX_GRAPH_PERMUTATION_NODES: usize = 9;
/// Influence Shapley values enumerate all `n!` orders up to this size.
pub const MAX_INFLUENCE_PERMUTATION_NODES: usize = 8;
/// Random orders used when a non-additive Shapley value must be sampled.
pub const SHAPLEY_FALLBACK_SAMPLES: usize = 4000;
const FALLBACK_SEED: u64 = 0x5eed_5a3b;

pub(crate) fn check_groups(n: usize, groups: &[Vec<NodeId>]) -> Result<()> {
    for s in groups {
        if s.is_empty() {
            return Err(Error::EmptySources);
        }
        if let Some(&node) = s.iter().find(|&&u| u >= n) {
            return Err(Error::NodeOutOfRange { node, n });
        }
    }
    Ok(())
}

fn node_report(mode: ReportMode, f: DistanceFunction, method: Method, values: Vec<f64>) -> CentralityReport {
    CentralityReport {
        mode,
        function: f.to_string(),
        method,
        keys: (0..values.len()).map(ReportKey::Node).collect(),
        values,
        std_errors: None,
        parameters: None,
    }
}

fn group_report(f: DistanceFunction, groups: &[Vec<NodeId>], values: Vec<f64>) -> CentralityReport {
    CentralityReport {
        mode: ReportMode::Group,
        function: f.to_string(),
        method: Method::Exact,
        keys: groups.iter().map(|s| ReportKey::Group(s.clone())).collect(),
        values,
        std_errors: None,
        parameters: None,
    }
}

/// `μ[f]` on a fixed graph.
pub fn graph_centrality(g: &DirectedGraph, f: DistanceFunction, mode: &CentralityMode) -> Result<CentralityReport> {
    let n = g.node_count();
    match mode {
        CentralityMode::Individual => {
            let values = (0..n).map(|v| f.eval(&bfs_unchecked(g, [v]))).collect();
            Ok(node_report(ReportMode::Individual, f, Method::Exact, values))
        }
        CentralityMode::Group(groups) => {
            check_groups(n, groups)?;
            let values = groups.iter().map(|s| f.eval(&bfs_unchecked(g, s.iter().copied()))).collect();
            Ok(group_report(f, groups, values))
        }
        CentralityMode::Shapley => {
            let values = if n <= MAX_GRAPH_PERMUTATION_NODES {
                let table: Vec<f64> = (0..1u64 << n).map(|m| f.eval(&bfs_from_mask(g, m))).collect();
                shapley_by_permutations(n, &table)
            } else if let Some(gf) = f.as_additive() {
                additive_graph_shapley(g, gf)
            } else {
                return Err(Error::TooLarge(format!(
                    "Shapley {f} on {n} nodes needs permutation enumeration (at most {MAX_GRAPH_PERMUTATION_NODES} nodes)"
                )));
            };
            Ok(node_report(ReportMode::Shapley, f, Method::Exact, values))
        }
    }
}

/// Shapley values of `S ↦ Σ_w g(d(S, w))`, one reverse BFS per target `w`.
pub(crate) fn additive_graph_shapley(g: &DirectedGraph, gf: NodeWiseFunction) -> Vec<f64> {
    let n = g.node_count();
    let mut phi = vec![0.0; n];
    let mut seen = vec![usize::MAX; n];
    let mut order: Vec<(NodeId, u32)> = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::new();
    for w in 0..n {
        order.clear();
        sizes.clear();
        seen[w] = w;
        order.push((w, 0));
        let mut head = 0;
        while head < order.len() {
            let (u, d) = order[head];
            head += 1;
            if sizes.len() <= d as usize {
                sizes.push(0);
            }
            sizes[d as usize] += 1;
            for &x in g.in_neighbors(u) {
                if seen[x] != w {
                    seen[x] = w;
                    order.push((x, d + 1));
                }
            }
        }
        let lvl = level_shapley(&sizes, gf);
        for &(u, d) in &order {
            phi[u] += lvl[d as usize];
        }
    }
    phi
}

/// `ψ[f]` of a diffusion model, by enumerating every live-edge outcome.
pub fn exact_influence_centrality(
    model: &TriggeringModel,
    f: DistanceFunction,
    mode: &CentralityMode,
) -> Result<CentralityReport> {
    exact_influence_centrality_with_cap(model, f, mode, DEFAULT_WORLD_CAP)
}

/// As [`exact_influence_centrality`], refusing models with more than `cap`
/// live-edge outcomes.
pub fn exact_influence_centrality_with_cap(
    model: &TriggeringModel,
    f: DistanceFunction,
    mode: &CentralityMode,
    cap: usize,
) -> Result<CentralityReport> {
    let n = model.node_count();
    match mode {
        CentralityMode::Individual => {
            let mut values = vec![0.0; n];
            model.for_each_world(cap, |w, p| {
                for (v, acc) in values.iter_mut().enumerate() {
                    *acc += p * f.eval(&bfs_unchecked(w, [v]));
                }
            })?;
            Ok(node_report(ReportMode::Individual, f, Method::Exact, values))
        }
        CentralityMode::Group(groups) => {
            check_groups(n, groups)?;
            let mut values = vec![0.0; groups.len()];
            model.for_each_world(cap, |w, p| {
                for (s, acc) in groups.iter().zip(values.iter_mut()) {
                    *acc += p * f.eval(&bfs_unchecked(w, s.iter().copied()));
                }
            })?;
            Ok(group_report(f, groups, values))
        }
        CentralityMode::Shapley if n <= MAX_INFLUENCE_PERMUTATION_NODES => {
            let mut table = vec![0.0; 1 << n];
            model.for_each_world(cap, |w, p| {
                for (m, acc) in table.iter_mut().enumerate() {
                    *acc += p * f.eval(&bfs_from_mask(w, m as u64));
                }
            })?;
            let values = shapley_by_permutations(n, &table);
            Ok(node_report(ReportMode::Shapley, f, Method::Exact, values))
        }
        CentralityMode::Shapley => match f.as_additive() {
            Some(gf) => {
                let mut values = vec![0.0; n];
                model.for_each_world(cap, |w, p| {
                    for (acc, x) in values.iter_mut().zip(additive_graph_shapley(w, gf)) {
                        *acc += p * x;
                    }
                })?;
                Ok(node_report(ReportMode::Shapley, f, Method::Exact, values))
            }
            None => sampled_shapley(model, f, cap),
        },
    }
}

/// Monte Carlo over random orders with exact coalition values.
fn sampled_shapley(model: &TriggeringModel, f: DistanceFunction, cap: usize) -> Result<CentralityReport> {
    let n = model.node_count();
    if n > 64 {
        return Err(Error::TooLarge(format!("sampled Shapley {f} supports at most 64 nodes, got {n}")));
    }
    let mut worlds: Vec<(DirectedGraph, f64)> = Vec::new();
    model.for_each_world(cap, |w, p| worlds.push((w.clone(), p)))?;
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let value = |mask: u64| {
        *cache
            .entry(mask)
            .or_insert_with(|| worlds.iter().map(|(w, p)| p * f.eval(&bfs_from_mask(w, mask))).sum())
    };
    let mut rng = RngStream::new(FALLBACK_SEED, 0);
    let (values, se) = shapley_by_sampling(n, value, SHAPLEY_FALLBACK_SAMPLES, &mut rng);
    let mut report = node_report(ReportMode::Shapley, f, Method::Estimated, values);
    report.std_errors = Some(se);
    Ok(report)
}
