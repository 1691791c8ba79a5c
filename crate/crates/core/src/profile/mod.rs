//! Influence profiles as explicit vectors over monotone set sequences, for
//! very small vertex sets.
//!
//! A sequence is keyed by its activation-time array; stationary sequences
//! carry the residual mass of each seed set and are left implicit.

mod basis;
pub mod linalg;

pub use basis::{basis_rank_check, reconstruct_centrality, Basis, BasisDecomposition, RankReport};

use std::collections::HashMap;

use serde::Serialize;

use crate::cascade::CascadingSequence;
use crate::centrality::shapley::shapley_by_permutations;
use crate::centrality::{check_groups, CentralityMode, DistanceFunction};
use crate::error::{Error, Result};
use crate::graph::{bfs_from_mask, build_layered_graph, Distance, LayeredGraphSpec};
use crate::model::{TriggeringModel, DEFAULT_WORLD_CAP};
use crate::NodeId;

/// Largest vertex count the profile space is built for.
pub const MAX_PROFILE_NODES: usize = 5;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_PROFILE_NODES {
        return Err(Error::TooLarge(format!(
            "influence profiles are enumerated for at most {MAX_PROFILE_NODES} nodes, got {n}"
        )));
    }
    Ok(())
}

/// Monotone and non-stationary: times `0..=h` all occur, with `h >= 1`.
fn is_profile_sequence(times: &[Distance]) -> bool {
    let h = times.iter().filter_map(|d| d.finite()).max();
    match h {
        Some(h) if h >= 1 => (0..=h).all(|t| times.contains(&Distance::Finite(t))),
        _ => false,
    }
}

fn seed_mask(times: &[Distance]) -> usize {
    times
        .iter()
        .enumerate()
        .filter(|(_, d)| **d == Distance::ZERO)
        .fold(0, |m, (v, _)| m | 1 << v)
}

fn stationary(n: usize, mask: usize) -> Vec<Distance> {
    (0..n)
        .map(|v| if mask >> v & 1 == 1 { Distance::ZERO } else { Distance::Inf })
        .collect()
}

/// Every monotone non-stationary sequence on `n` vertices, in lexicographic
/// order of activation times (`inf` last).
#[derive(Clone, Debug)]
pub struct SequenceIndex {
    n: usize,
    sequences: Vec<Vec<Distance>>,
    lookup: HashMap<Vec<Distance>, usize>,
    by_seed: Vec<Vec<usize>>,
}

impl SequenceIndex {
    pub fn new(n: usize) -> Result<Self> {
        check_size(n)?;
        let alphabet: Vec<Distance> = (0..n as u32).map(Distance::Finite).chain([Distance::Inf]).collect();
        let mut sequences = Vec::new();
        let mut digits = vec![0usize; n];
        if n > 0 {
            'outer: loop {
                let times: Vec<Distance> = digits.iter().map(|&i| alphabet[i]).collect();
                if is_profile_sequence(&times) {
                    sequences.push(times);
                }
                // odometer, last position fastest
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break 'outer;
                    }
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < alphabet.len() {
                        break;
                    }
                    digits[pos] = 0;
                }
            }
        }
        let lookup = sequences.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut by_seed = vec![Vec::new(); 1 << n];
        for (i, s) in sequences.iter().enumerate() {
            by_seed[seed_mask(s)].push(i);
        }
        Ok(SequenceIndex { n, sequences, lookup, by_seed })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// The dimension `M`.
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn times(&self, i: usize) -> &[Distance] {
        &self.sequences[i]
    }

    pub fn sequence(&self, i: usize) -> CascadingSequence {
        CascadingSequence::from_times(self.sequences[i].clone())
    }

    /// Index of a sequence given by its activation times; `None` for
    /// stationary or malformed arrays.
    pub fn position(&self, times: &[Distance]) -> Option<usize> {
        self.lookup.get(times).copied()
    }

    /// Indices of the sequences whose seed set is `mask`.
    pub fn seeded_by(&self, mask: usize) -> &[usize] {
        &self.by_seed[mask]
    }
}

pub fn enumerate_sequences(n: usize) -> Result<SequenceIndex> {
    SequenceIndex::new(n)
}

/// All layered-graph specs with at least two layers, built by choosing each
/// layer as a nonempty subset of the unused vertices.
pub fn enumerate_layered_instances(n: usize) -> Result<Vec<LayeredGraphSpec>> {
    check_size(n)?;
    fn grow(n: usize, used: usize, layers: &mut Vec<Vec<NodeId>>, out: &mut Vec<LayeredGraphSpec>) {
        if layers.len() >= 2 {
            out.push(LayeredGraphSpec::new(n, layers.clone()).expect("layers are disjoint and nonempty"));
        }
        let free = !used & ((1 << n) - 1);
        let mut sub = free;
        // nonempty subsets of `free`, in increasing order
        let mut subsets = Vec::new();
        while sub > 0 {
            subsets.push(sub);
            sub = (sub - 1) & free;
        }
        for &s in subsets.iter().rev() {
            layers.push((0..n).filter(|v| s >> v & 1 == 1).collect());
            grow(n, used | s, layers, out);
            layers.pop();
        }
    }
    let mut out = Vec::new();
    grow(n, 0, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Probabilities of the non-stationary sequences for every seed set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileVector {
    n: usize,
    values: Vec<f64>,
}

impl ProfileVector {
    pub fn new(index: &SequenceIndex, values: Vec<f64>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::DimensionMismatch { expected: index.len(), found: values.len() });
        }
        Ok(ProfileVector { n: index.node_count(), values })
    }

    pub fn zeros(index: &SequenceIndex) -> Self {
        ProfileVector { n: index.node_count(), values: vec![0.0; index.len()] }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `α·self + (1−α)·other`.
    pub fn mix(&self, other: &ProfileVector, alpha: f64) -> Result<ProfileVector> {
        if self.n != other.n || self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: other.values.len() });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
        Ok(ProfileVector { n: self.n, values })
    }

    /// Mass on non-stationary sequences seeded by `mask`.
    pub fn seed_mass(&self, index: &SequenceIndex, mask: usize) -> f64 {
        index.seeded_by(mask).iter().map(|&i| self.values[i]).sum()
    }

    fn check(&self, index: &SequenceIndex) -> Result<()> {
        if self.n != index.node_count() || self.values.len() != index.len() {
            return Err(Error::DimensionMismatch { expected: index.len(), found: self.values.len() });
        }
        Ok(())
    }
}

/// The 0/1 vector of a layered-graph instance; all zero for the null spec.
pub fn layered_instance_vector(spec: &LayeredGraphSpec, index: &SequenceIndex) -> Result<ProfileVector> {
    let n = index.node_count();
    if spec.node_count() != n {
        return Err(Error::DimensionMismatch { expected: n, found: spec.node_count() });
    }
    let g = build_layered_graph(spec);
    let mut values = vec![0.0; index.len()];
    for mask in 1..1u64 << n {
        if let Some(i) = index.position(&bfs_from_mask(&g, mask)) {
            values[i] = 1.0;
        }
    }
    Ok(ProfileVector { n, values })
}

/// `P_I` of a model, summed over its live-edge outcomes.
pub fn exact_profile(model: &TriggeringModel, index: &SequenceIndex) -> Result<ProfileVector> {
    let n = index.node_count();
    if model.node_count() != n {
        return Err(Error::DimensionMismatch { expected: n, found: model.node_count() });
    }
    let mut values = vec![0.0; index.len()];
    model.for_each_world(DEFAULT_WORLD_CAP, |w, p| {
        for mask in 1..1u64 << n {
            if let Some(i) = index.position(&bfs_from_mask(w, mask)) {
                values[i] += p;
            }
        }
    })?;
    Ok(ProfileVector { n, values })
}

/// Group value `E[f(d)]` under the sequences seeded by `mask`, with the
/// residual mass on the stationary sequence.
fn profile_group_value(profile: &ProfileVector, index: &SequenceIndex, f: DistanceFunction, mask: usize) -> f64 {
    if mask == 0 {
        return f.eval(&vec![Distance::Inf; index.node_count()]);
    }
    let mut total = 0.0;
    let mut mass = 0.0;
    for &i in index.seeded_by(mask) {
        let p = profile.values[i];
        total += p * f.eval(index.times(i));
        mass += p;
    }
    total + (1.0 - mass) * f.eval(&stationary(index.node_count(), mask))
}

/// Centrality values determined by a profile alone.
pub fn profile_centrality(
    profile: &ProfileVector,
    index: &SequenceIndex,
    f: DistanceFunction,
    mode: &CentralityMode,
) -> Result<Vec<f64>> {
    profile.check(index)?;
    let n = index.node_count();
    Ok(match mode {
        CentralityMode::Individual => (0..n).map(|v| profile_group_value(profile, index, f, 1 << v)).collect(),
        CentralityMode::Group(groups) => {
            check_groups(n, groups)?;
            groups
                .iter()
                .map(|s| profile_group_value(profile, index, f, s.iter().fold(0, |m, &v| m | 1 << v)))
                .collect()
        }
        CentralityMode::Shapley => {
            let table: Vec<f64> = (0..1 << n).map(|m| profile_group_value(profile, index, f, m)).collect();
            shapley_by_permutations(n, &table)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::exact_influence_centrality;
    use crate::graph::DirectedGraph;

    fn fin(d: u32) -> Distance {
        Distance::Finite(d)
    }

    #[test]
    fn dimensions() {
        let expect = [0, 0, 2, 18, 134, 1050];
        for (n, &m) in expect.iter().enumerate() {
            let index = enumerate_sequences(n).unwrap();
            assert_eq!(index.len(), m, "n = {n}");
            assert_eq!(enumerate_layered_instances(n).unwrap().len(), m, "n = {n}");
        }
        assert!(matches!(enumerate_sequences(6), Err(Error::TooLarge(_))));
        assert!(matches!(enumerate_layered_instances(6), Err(Error::TooLarge(_))));
    }

    #[test]
    fn two_node_sequences() {
        let index = enumerate_sequences(2).unwrap();
        assert_eq!(index.times(0), &[fin(0), fin(1)]);
        assert_eq!(index.times(1), &[fin(1), fin(0)]);
        let specs = enumerate_layered_instances(2).unwrap();
        assert_eq!(specs[0].layers(), &[vec![0], vec![1]]);
        assert_eq!(specs[1].layers(), &[vec![1], vec![0]]);
    }

    #[test]
    fn three_node_layer_counts() {
        let specs = enumerate_layered_instances(3).unwrap();
        assert_eq!(specs.iter().filter(|s| s.depth() == 1).count(), 12);
        assert_eq!(specs.iter().filter(|s| s.depth() == 2).count(), 6);
        let mut uniq = specs.clone();
        uniq.sort_by_key(|s| s.to_string());
        uniq.dedup();
        assert_eq!(uniq.len(), 18);
    }

    #[test]
    fn layered_vectors() {
        let index = enumerate_sequences(2).unwrap();
        let null = layered_instance_vector(&LayeredGraphSpec::null(2), &index).unwrap();
        assert_eq!(null.values(), &[0.0, 0.0]);
        let spec = LayeredGraphSpec::new(2, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(layered_instance_vector(&spec, &index).unwrap().values(), &[1.0, 0.0]);

        let index = enumerate_sequences(3).unwrap();
        let spec = LayeredGraphSpec::new(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        let v = layered_instance_vector(&spec, &index).unwrap();
        let i = index.position(&[fin(0), fin(1), fin(2)]).unwrap();
        assert_eq!(v.values()[i], 1.0);
        assert!(layered_instance_vector(&spec, &enumerate_sequences(2).unwrap()).is_err());
    }

    #[test]
    fn single_edge_profile() {
        let index = enumerate_sequences(2).unwrap();
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let half = TriggeringModel::independent_cascade(g.clone(), &[0.5]).unwrap();
        assert_eq!(exact_profile(&half, &index).unwrap().values(), &[0.5, 0.0]);
        let none = TriggeringModel::independent_cascade(g.clone(), &[0.0]).unwrap();
        assert_eq!(exact_profile(&none, &index).unwrap().values(), &[0.0, 0.0]);
        let certain = TriggeringModel::bfs_instance(g);
        assert_eq!(exact_profile(&certain, &index).unwrap().values(), &[1.0, 0.0]);
    }

    #[test]
    fn profile_mass_is_a_distribution() {
        let index = enumerate_sequences(4).unwrap();
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let m = TriggeringModel::independent_cascade(g, &[0.3, 0.6, 0.5, 0.2, 0.9]).unwrap();
        let p = exact_profile(&m, &index).unwrap();
        assert!(p.values().iter().all(|&x| (0.0..=1.0).contains(&x)));
        for mask in 1..16 {
            assert!(p.seed_mass(&index, mask) <= 1.0 + 1e-12);
        }
        assert!((p.seed_mass(&index, 15) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn profile_centrality_matches_enumeration() {
        let index = enumerate_sequences(3).unwrap();
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let m = TriggeringModel::independent_cascade(g, &[0.4, 0.7, 0.2]).unwrap();
        let p = exact_profile(&m, &index).unwrap();
        let modes = [CentralityMode::Individual, CentralityMode::Group(vec![vec![0, 2], vec![1]]), CentralityMode::Shapley];
        for f in DistanceFunction::builtins(1) {
            for mode in &modes {
                let a = profile_centrality(&p, &index, f, mode).unwrap();
                let b = exact_influence_centrality(&m, f, mode).unwrap().values;
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-12, "{f} {mode:?}: {x} vs {y}");
                }
            }
        }
    }
}
