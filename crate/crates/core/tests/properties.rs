use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use rand::Rng;

use influence_centrality::estimator::{final_theta, kth_largest, theta_schedule};
use influence_centrality::profile::{exact_profile, SequenceIndex};
use influence_centrality::{
    bfs_instance_sequence, estimate, exact_influence_centrality, graph_centrality, rr_shapley_values, sample_live_edge_graph,
    sample_rr_set, simulate_cascade, validate_sequence, CentralityMode, DirectedGraph, Distance, DistanceFunction,
    EstimationMode, EstimatorConfig, NodeId, NodeWiseFunction, RngStream, TriggerDistribution, TriggeringModel,
};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = DirectedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=n * 2).prop_map(move |pairs| {
            let mut edges: Vec<(NodeId, NodeId)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            edges.sort_unstable();
            edges.dedup();
            DirectedGraph::from_edges(n, edges).unwrap()
        })
    })
}

fn ic_strategy(max_n: usize) -> impl Strategy<Value = TriggeringModel> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let m = g.edge_count();
        proptest::collection::vec(0.0..=1.0f64, m)
            .prop_map(move |probs| TriggeringModel::independent_cascade(g.clone(), &probs).unwrap())
    })
}

fn small_ic() -> impl Strategy<Value = TriggeringModel> {
    ic_strategy(6).prop_filter("enumerable", |m| m.graph().edge_count() <= 10)
}

fn seeds_for(n: usize, mask: u64) -> Vec<NodeId> {
    let s: Vec<NodeId> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
    if s.is_empty() {
        vec![(mask as usize) % n]
    } else {
        s
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cascade_equals_bfs_on_live_edge_graph(model in ic_strategy(10), mask: u64, seed: u64) {
        let seeds = seeds_for(model.node_count(), mask);
        let mut a = RngStream::new(seed, 1);
        let mut b = a.clone();
        let seq = simulate_cascade(&model, &seeds, &mut a).unwrap();
        let live = sample_live_edge_graph(&model, &mut b);
        prop_assert_eq!(&seq, &bfs_instance_sequence(&live, &seeds).unwrap());
        prop_assert!(validate_sequence(model.graph(), &seq).is_ok());
    }

    #[test]
    fn cascades_stabilize_and_grow(model in ic_strategy(10), mask: u64, seed: u64) {
        let n = model.node_count();
        let seq = simulate_cascade(&model, &seeds_for(n, mask), &mut RngStream::new(seed, 0)).unwrap();
        prop_assert!((seq.horizon() as usize) < n);
        let sets = seq.sets();
        for t in 0..sets.len() {
            prop_assert!(!sets[t].is_empty());
        }
    }

    #[test]
    fn cascades_reproduce_from_seed(model in ic_strategy(10), mask: u64, seed: u64) {
        let seeds = seeds_for(model.node_count(), mask);
        let a = simulate_cascade(&model, &seeds, &mut RngStream::new(seed, 5)).unwrap();
        let b = simulate_cascade(&model, &seeds, &mut RngStream::new(seed, 5)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn shapley_is_efficient(model in small_ic(), pick in 0usize..5) {
        let n = model.node_count();
        let f = DistanceFunction::builtins(2)[pick];
        let phi = exact_influence_centrality(&model, f, &CentralityMode::Shapley).unwrap().values;
        let all = exact_influence_centrality(&model, f, &CentralityMode::Group(vec![(0..n).collect()])).unwrap().values[0];
        let empty = f.eval(&vec![Distance::Inf; n]);
        prop_assert!((phi.iter().sum::<f64>() - (all - empty)).abs() <= 1e-9);
    }

    #[test]
    fn isolated_nodes_are_symmetric_null_players(g in graph_strategy(6), pick in 0usize..5) {
        // Two extra isolated nodes: symmetric to each other, and their
        // marginal contribution equals the value of a singleton.
        let n = g.node_count();
        let g2 = DirectedGraph::from_edges(n + 2, g.edges().to_vec()).unwrap();
        let f = DistanceFunction::builtins(2)[pick];
        let phi = graph_centrality(&g2, f, &CentralityMode::Shapley).unwrap().values;
        prop_assert!((phi[n] - phi[n + 1]).abs() <= 1e-12);
        if let Some(h) = f.as_additive() {
            prop_assert!((phi[n] - (h.eval(Distance::Finite(0)) - h.eval(Distance::Inf))).abs() <= 1e-9);
        }
    }

    #[test]
    fn sphere_of_influence_interpolates(model in small_ic()) {
        let n = model.node_count() as u32;
        let ind = CentralityMode::Individual;
        let eval = |g: NodeWiseFunction| exact_influence_centrality(&model, g.into(), &ind).unwrap().values;
        let deg = eval(NodeWiseFunction::Degree);
        let soi1 = eval(NodeWiseFunction::SphereOfInfluence(1));
        for (a, b) in soi1.iter().zip(&deg) {
            prop_assert!((a - (b + 1.0)).abs() <= 1e-12);
        }
        let top = eval(NodeWiseFunction::SphereOfInfluence(n.saturating_sub(1).max(1)));
        let rch = eval(NodeWiseFunction::Reachability);
        if n >= 2 {
            for (a, b) in top.iter().zip(&rch) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn group_reachability_is_monotone(model in small_ic(), a: u64, b: u64) {
        let n = model.node_count();
        let small = seeds_for(n, a);
        let mut large: Vec<NodeId> = small.iter().copied().chain(seeds_for(n, b)).collect();
        large.sort_unstable();
        large.dedup();
        let r = exact_influence_centrality(&model, NodeWiseFunction::Reachability.into(), &CentralityMode::Group(vec![small, large]))
            .unwrap()
            .values;
        prop_assert!(r[0] <= r[1] + 1e-12);
    }

    #[test]
    fn rr_sets_are_well_formed(model in ic_strategy(12), seed: u64, pick in 0usize..4) {
        let mut rng = RngStream::new(seed, 0);
        let rr = sample_rr_set(&model, &mut rng, None);
        prop_assert_eq!(rr.distance_of(rr.root()), Distance::Finite(0));
        let sizes = rr.level_sizes();
        prop_assert_eq!(sizes[0], 1);
        prop_assert!(sizes.iter().all(|&s| s > 0));
        let suffix = rr.suffix_counts();
        prop_assert!(suffix.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(sizes.iter().sum::<usize>(), rr.len());
        // The Shapley values split g(0), the value of the full set.
        let g = [NodeWiseFunction::Degree, NodeWiseFunction::Harmonic, NodeWiseFunction::Reachability, NodeWiseFunction::SphereOfInfluence(2)][pick];
        let total: f64 = rr_shapley_values(&rr, g).iter().map(|(_, p)| p).sum();
        prop_assert!((total - g.eval(Distance::Finite(0))).abs() <= 1e-9);
    }

    #[test]
    fn kth_largest_matches_sorting(values in proptest::collection::vec(-100.0..100.0f64, 1..20), k in 1usize..25) {
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        match kth_largest(&values, k) {
            Ok(x) => prop_assert_eq!(x, sorted[k - 1]),
            Err(_) => prop_assert!(k > values.len()),
        }
    }
}

#[test]
fn theta_constants_are_frozen() {
    let eps_prime = SQRT_2 * 0.5;
    assert_eq!(theta_schedule(16, eps_prime, 1.0, 1).unwrap(), 76);
    assert_eq!(theta_schedule(16, eps_prime, 1.0, 2).unwrap(), 151);
    assert_eq!(theta_schedule(16, eps_prime, 1.0, 3).unwrap(), 302);
    assert_eq!(final_theta(16, 0.5, 1.0, 2.0).unwrap(), 518);
}

#[test]
fn kth_largest_examples() {
    assert_eq!(kth_largest(&[3.0, 9.0, 1.0, 7.0], 1).unwrap(), 9.0);
    assert_eq!(kth_largest(&[3.0, 9.0, 1.0, 7.0], 3).unwrap(), 3.0);
    assert_eq!(kth_largest(&[5.0, 5.0, 2.0], 2).unwrap(), 5.0);
    assert!(kth_largest(&[1.0], 2).is_err());
}

#[test]
fn live_edge_frequency_matches_probability() {
    let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
    let model = TriggeringModel::independent_cascade_uniform(g, 0.5).unwrap();
    let draws = 10_000;
    let mut rng = RngStream::new(42, 0);
    let live = (0..draws).filter(|_| sample_live_edge_graph(&model, &mut rng).edge_count() == 1).count() as f64;
    let sigma = (draws as f64 * 0.25).sqrt();
    assert!((live - 5000.0).abs() <= 3.0 * sigma, "{live}");
}

#[test]
fn linear_threshold_picks_one_in_neighbor_by_weight() {
    let g = DirectedGraph::from_edges(3, [(0, 2), (1, 2)]).unwrap();
    let model = TriggeringModel::linear_threshold(g, &[0.3, 0.7]).unwrap();
    let draws = 10_000;
    let mut rng = RngStream::new(7, 0);
    let mut set = Vec::new();
    let mut from_zero = 0usize;
    for _ in 0..draws {
        model.sample_triggering_set(2, &mut rng, &mut set);
        assert_eq!(set.len(), 1);
        from_zero += (set[0] == 0) as usize;
    }
    let sigma = (draws as f64 * 0.3 * 0.7).sqrt();
    assert!((from_zero as f64 - 3000.0).abs() <= 4.0 * sigma, "{from_zero}");
}

#[test]
fn profile_of_a_mixture_is_the_mixture_of_profiles() {
    // Node 2 draws {0} with probability a and {1} otherwise, so the model is
    // the a-mixture of the two deterministic instances.
    let g = DirectedGraph::from_edges(3, [(0, 2), (1, 2), (2, 0)]).unwrap();
    let index = SequenceIndex::new(3).unwrap();
    let with = |dist: TriggerDistribution| {
        let dists = vec![TriggerDistribution::certain(vec![2]), TriggerDistribution::certain(vec![]), dist];
        exact_profile(&TriggeringModel::explicit(g.clone(), dists).unwrap(), &index).unwrap()
    };
    let a = 0.35;
    let mixed = with(TriggerDistribution::new(vec![(vec![0], a), (vec![1], 1.0 - a)]).unwrap());
    let first = with(TriggerDistribution::certain(vec![0]));
    let second = with(TriggerDistribution::certain(vec![1]));
    let expected = first.mix(&second, a).unwrap();
    for (x, y) in mixed.values().iter().zip(expected.values()) {
        assert!((x - y).abs() <= 1e-12);
    }
}

#[test]
fn estimator_is_unbiased_across_seeds() {
    let g = DirectedGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (3, 0)]).unwrap();
    let model = TriggeringModel::independent_cascade(g, &[0.6, 0.5, 0.7, 0.4, 0.8, 0.3]).unwrap();
    let exact = exact_influence_centrality(&model, NodeWiseFunction::Harmonic.into(), &CentralityMode::Individual)
        .unwrap()
        .values;
    let runs = 200;
    let mut samples = vec![Vec::with_capacity(runs); 6];
    for run in 0..runs {
        let mut cfg = EstimatorConfig::new(NodeWiseFunction::Harmonic, EstimationMode::Individual);
        cfg.epsilon = 0.5;
        cfg.seed = run as u64;
        let (r, _) = estimate(&model, &cfg).unwrap();
        for (v, x) in r.values.iter().enumerate() {
            samples[v].push(*x);
        }
    }
    for (v, xs) in samples.iter().enumerate() {
        let k = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / k;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
        let se = (var / k).sqrt();
        assert!((mean - exact[v]).abs() <= 4.0 * se.max(1e-12), "node {v}: {mean} vs {} (se {se})", exact[v]);
    }
}

#[test]
fn estimator_replays_bit_for_bit() {
    let mut rng = RngStream::new(3, 3);
    let edges: Vec<(NodeId, NodeId)> = (0..40).map(|_| (rng.gen_range(0..20), rng.gen_range(0..20))).filter(|(u, v)| u != v).collect();
    let mut edges = edges;
    edges.sort_unstable();
    edges.dedup();
    let model = TriggeringModel::independent_cascade_uniform(DirectedGraph::from_edges(20, edges).unwrap(), 0.3).unwrap();
    for mode in [EstimationMode::Individual, EstimationMode::Shapley] {
        let mut cfg = EstimatorConfig::new(NodeWiseFunction::Harmonic, mode);
        cfg.epsilon = 0.3;
        cfg.seed = 11;
        let (a, ta) = estimate(&model, &cfg).unwrap();
        cfg.workers = 3;
        let (b, tb) = estimate(&model, &cfg).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(ta.theta, tb.theta);
        assert_eq!(ta.lower_bound, tb.lower_bound);
    }
}
