//! Two-phase RR-set estimation of additive centralities.
//!
//! Phase 1 doubles a guess `x` of the k-th largest centrality downwards until
//! the sampled estimate clears it, giving a lower bound `LB`. Phase 2 draws
//! `θ(LB)` fresh RR sets and reports `n · est / θ`.
//!
//! Sets are drawn in fixed-size chunks, each from its own RNG stream keyed by
//! `(batch, chunk)`, and chunk sums are merged in chunk order. The output is
//! therefore bit-identical for any worker count.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::{check_groups, NodeWiseFunction};
use crate::error::{Error, Result};
use crate::model::TriggeringModel;
use crate::report::{CentralityReport, EstimateParameters, Method, ReportKey, ReportMode};
use crate::rng::RngStream;
use crate::rr::{level_shapley, RRSampler};
use crate::NodeId;

pub const DEFAULT_MAX_RR_SETS: u64 = 100_000_000;
/// RR sets per RNG stream.
pub const CHUNK_SIZE: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EstimationMode {
    Individual,
    Shapley,
    Group(Vec<Vec<NodeId>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    pub ell: f64,
    pub k: usize,
    pub mode: EstimationMode,
    pub g: NodeWiseFunction,
    pub seed: u64,
    pub workers: usize,
    pub max_rr_sets: u64,
}

impl EstimatorConfig {
    pub fn new(g: NodeWiseFunction, mode: EstimationMode) -> Self {
        EstimatorConfig {
            epsilon: 0.1,
            ell: 1.0,
            k: 1,
            mode,
            g,
            seed: 0,
            workers: 1,
            max_rr_sets: DEFAULT_MAX_RR_SETS,
        }
    }

    fn key_count(&self, n: usize) -> usize {
        match &self.mode {
            EstimationMode::Group(groups) => groups.len(),
            _ => n,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidConfig("the graph has no nodes".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(Error::InvalidConfig(format!("ell must be positive, got {}", self.ell)));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("at least one worker is needed".into()));
        }
        if let EstimationMode::Group(groups) = &self.mode {
            if groups.is_empty() {
                return Err(Error::InvalidConfig("group mode needs at least one query set".into()));
            }
            check_groups(n, groups)?;
        }
        let keys = self.key_count(n);
        if self.k == 0 || self.k > keys {
            return Err(Error::InvalidConfig(format!("k must lie in 1..={keys}, got {}", self.k)));
        }
        Ok(())
    }
}

fn phase_one_rounds(n: usize) -> u32 {
    (n as f64).log2().floor().max(1.0) as u32 - 1
}

/// `θ_i` for `x = n / 2^i`, `1 <= i <= ⌊log₂ n⌋ − 1`.
pub fn theta_schedule(n: usize, eps_prime: f64, ell: f64, i: u32) -> Result<u64> {
    let rounds = phase_one_rounds(n);
    if i == 0 || i > rounds {
        return Err(Error::InvalidConfig(format!("round {i} is outside 1..={rounds} for n = {n}")));
    }
    let nf = n as f64;
    let x = nf / 2f64.powi(i as i32);
    let log_term = (ell + 1.0) * nf.ln() + nf.log2().ln() + 2f64.ln();
    let value = nf * log_term * (2.0 + 2.0 * eps_prime / 3.0) / (eps_prime * eps_prime * x);
    Ok(value.ceil() as u64)
}

/// Phase-2 sample count for a lower bound `lb >= 1`.
pub fn final_theta(n: usize, epsilon: f64, ell: f64, lb: f64) -> Result<u64> {
    if !(lb >= 1.0) {
        return Err(Error::InvalidConfig(format!("the lower bound must be at least 1, got {lb}")));
    }
    let nf = n as f64;
    let value = nf * ((ell + 1.0) * nf.ln() + 4f64.ln()) * (2.0 + 2.0 * epsilon / 3.0) / (epsilon * epsilon * lb);
    Ok((value.ceil() as u64).max(1))
}

/// k-th largest value, duplicates counted.
pub fn kth_largest(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return Err(Error::InvalidConfig(format!("k must lie in 1..={}, got {k}", values.len())));
    }
    let mut v = values.to_vec();
    let (_, kth, _) = v.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    Ok(*kth)
}

/// The accuracy guarantee: relative error `ε` above the k-th largest true
/// value, absolute error `ε·ψ^(k)` at or below it.
pub fn within_error_bounds(estimate: &[f64], exact: &[f64], epsilon: f64, k: usize) -> Result<bool> {
    if estimate.len() != exact.len() {
        return Err(Error::DimensionMismatch { expected: exact.len(), found: estimate.len() });
    }
    let kth = kth_largest(exact, k)?;
    Ok(estimate.iter().zip(exact).all(|(e, x)| {
        let scale = if *x > kth { *x } else { kth };
        (e - x).abs() <= epsilon * scale
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseOneStep {
    pub i: u32,
    pub x: f64,
    pub theta_i: u64,
    pub est_k: f64,
    pub stop: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimationTrace {
    pub steps: Vec<PhaseOneStep>,
    pub lower_bound: f64,
    pub theta: u64,
    pub phase_one_rr_sets: u64,
    pub phase_two_rr_sets: u64,
    pub mean_rr_size: f64,
    /// The k-th largest estimate is below 1, outside the accuracy guarantee.
    pub kth_estimate_below_one: bool,
    #[serde(skip)]
    pub phase_one_time: Duration,
    #[serde(skip)]
    pub phase_two_time: Duration,
}

struct Accumulator {
    est: Vec<f64>,
    members: u64,
}

struct Batch<'a> {
    model: &'a TriggeringModel,
    cfg: &'a EstimatorConfig,
    keys: usize,
}

impl Batch<'_> {
    fn chunk(&self, stream: u64, count: u64) -> Accumulator {
        let n = self.model.node_count();
        let mut rng = RngStream::new(self.cfg.seed, stream);
        let mut sampler = RRSampler::new(self.model);
        let mut acc = Accumulator { est: vec![0.0; self.keys], members: 0 };
        let mut mark = vec![u32::MAX; if matches!(self.cfg.mode, EstimationMode::Group(_)) { n } else { 0 }];
        let g = self.cfg.g;
        for _ in 0..count {
            let rr = sampler.sample(&mut rng, None);
            acc.members += rr.len() as u64;
            match &self.cfg.mode {
                EstimationMode::Individual => {
                    for (u, d) in rr.iter() {
                        acc.est[u] += g.eval_level(d);
                    }
                }
                EstimationMode::Shapley => {
                    let phi = level_shapley(rr.level_sizes(), g);
                    for (u, d) in rr.iter() {
                        acc.est[u] += phi[d as usize];
                    }
                }
                EstimationMode::Group(groups) => {
                    for (u, d) in rr.iter() {
                        mark[u] = d;
                    }
                    for (s, e) in groups.iter().zip(acc.est.iter_mut()) {
                        if let Some(d) = s.iter().map(|&u| mark[u]).min().filter(|&d| d != u32::MAX) {
                            *e += g.eval_level(d);
                        }
                    }
                    for &u in rr.nodes() {
                        mark[u] = u32::MAX;
                    }
                }
            }
        }
        acc
    }

    /// Adds `count` RR sets from batch `batch` into `total`.
    fn run(&self, pool: Option<&rayon::ThreadPool>, batch: u64, count: u64, total: &mut Accumulator) {
        let chunks = count.div_ceil(CHUNK_SIZE);
        let size = |c: u64| CHUNK_SIZE.min(count - c * CHUNK_SIZE);
        let stream = |c: u64| batch << 32 | c;
        let wave = pool.map_or(1, |p| p.current_num_threads()) as u64;
        let mut c = 0;
        while c < chunks {
            let end = (c + wave).min(chunks);
            let parts: Vec<Accumulator> = match pool {
                Some(p) => p.install(|| (c..end).into_par_iter().map(|i| self.chunk(stream(i), size(i))).collect()),
                None => (c..end).map(|i| self.chunk(stream(i), size(i))).collect(),
            };
            for part in parts {
                for (t, x) in total.est.iter_mut().zip(&part.est) {
                    *t += x;
                }
                total.members += part.members;
            }
            c = end;
        }
    }
}

fn check_budget(used: u64, more: u64, cap: u64) -> Result<()> {
    let requested = used.saturating_add(more);
    if requested > cap {
        return Err(Error::BudgetExceeded { requested, cap });
    }
    Ok(())
}

/// Runs both phases and reports `ψ̂ = n · est / θ` per node or query set.
pub fn estimate(model: &TriggeringModel, cfg: &EstimatorConfig) -> Result<(CentralityReport, EstimationTrace)> {
    let n = model.node_count();
    cfg.validate(n)?;
    let keys = cfg.key_count(n);
    let pool = if cfg.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?,
        )
    } else {
        None
    };
    let batch = Batch { model, cfg, keys };
    let nf = n as f64;
    let eps_prime = std::f64::consts::SQRT_2 * cfg.epsilon;

    let started = Instant::now();
    let mut acc = Accumulator { est: vec![0.0; keys], members: 0 };
    let mut lb = 1.0;
    let mut steps = Vec::new();
    let mut prev = 0;
    for i in 1..=phase_one_rounds(n) {
        let x = nf / 2f64.powi(i as i32);
        let theta_i = theta_schedule(n, eps_prime, cfg.ell, i)?;
        check_budget(prev, theta_i - prev, cfg.max_rr_sets)?;
        batch.run(pool.as_ref(), i as u64, theta_i - prev, &mut acc);
        prev = theta_i;
        let est_k = kth_largest(&acc.est, cfg.k)?;
        let stop = nf * est_k / theta_i as f64 >= (1.0 + eps_prime) * x;
        steps.push(PhaseOneStep { i, x, theta_i, est_k, stop });
        if stop {
            lb = nf * est_k / (theta_i as f64 * (1.0 + eps_prime));
            break;
        }
    }
    let phase_one_time = started.elapsed();
    let phase_one_members = acc.members;

    let started = Instant::now();
    let theta = final_theta(n, cfg.epsilon, cfg.ell, lb)?;
    check_budget(prev, theta, cfg.max_rr_sets)?;
    let mut acc = Accumulator { est: vec![0.0; keys], members: 0 };
    // batch 0 is reserved for phase 2
    batch.run(pool.as_ref(), 0, theta, &mut acc);
    let values: Vec<f64> = acc.est.iter().map(|e| nf * e / theta as f64).collect();
    let phase_two_time = started.elapsed();

    let trace = EstimationTrace {
        steps,
        lower_bound: lb,
        theta,
        phase_one_rr_sets: prev,
        phase_two_rr_sets: theta,
        mean_rr_size: (phase_one_members + acc.members) as f64 / (prev + theta) as f64,
        kth_estimate_below_one: kth_largest(&values, cfg.k)? < 1.0,
        phase_one_time,
        phase_two_time,
    };
    let (mode, keys) = match &cfg.mode {
        EstimationMode::Individual => (ReportMode::Individual, (0..n).map(ReportKey::Node).collect()),
        EstimationMode::Shapley => (ReportMode::Shapley, (0..n).map(ReportKey::Node).collect()),
        EstimationMode::Group(groups) => (ReportMode::Group, groups.iter().cloned().map(ReportKey::Group).collect()),
    };
    let report = CentralityReport {
        mode,
        function: cfg.g.to_string(),
        method: Method::Estimated,
        keys,
        values,
        std_errors: None,
        parameters: Some(EstimateParameters {
            epsilon: cfg.epsilon,
            ell: cfg.ell,
            k: cfg.k,
            seed: cfg.seed,
            workers: cfg.workers,
            rr_sets: prev + theta,
        }),
    };
    Ok((report, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{exact_influence_centrality, CentralityMode};
    use crate::graph::{build_layered_graph, DirectedGraph};
    use crate::test_fixtures::four_layers;
    use NodeWiseFunction::*;

    #[test]
    fn kth_examples() {
        assert_eq!(kth_largest(&[3.0, 1.0, 2.0], 2).unwrap(), 2.0);
        assert_eq!(kth_largest(&[5.0, 5.0, 1.0], 2).unwrap(), 5.0);
        assert_eq!(kth_largest(&[0.5, 7.0, 2.0], 1).unwrap(), 7.0);
        assert!(kth_largest(&[1.0], 0).is_err());
        assert!(kth_largest(&[1.0], 2).is_err());
    }

    #[test]
    fn error_bounds_use_the_kth_value() {
        let exact = [10.0, 4.0, 1.0];
        assert!(within_error_bounds(&[11.0, 4.7, 1.7], &exact, 0.2, 2).unwrap());
        assert!(!within_error_bounds(&[12.5, 4.0, 1.0], &exact, 0.2, 2).unwrap());
        assert!(within_error_bounds(&[10.0, 4.0, 2.9], &exact, 0.2, 1).unwrap());
        assert!(within_error_bounds(&[1.0], &exact, 0.2, 1).is_err());
    }

    #[test]
    fn theta_structure() {
        let ep = std::f64::consts::SQRT_2 * 0.5;
        let a = theta_schedule(1024, ep, 1.0, 3).unwrap();
        let b = theta_schedule(1024, ep, 1.0, 4).unwrap();
        assert!(b > a && b.abs_diff(2 * a) <= 2);
        assert!(theta_schedule(16, ep, 1.0, 0).is_err());
        assert!(theta_schedule(16, ep, 1.0, 4).is_err());
        assert!(theta_schedule(16, ep, 1.0, 3).unwrap() >= 1);
        let t1 = final_theta(100, 0.2, 1.0, 1.0).unwrap();
        let t2 = final_theta(100, 0.2, 1.0, 2.0).unwrap();
        assert!(t1.abs_diff(2 * t2) <= 2);
        let t3 = final_theta(100, 0.1, 1.0, 1.0).unwrap();
        assert!((t3 as f64 / t1 as f64) > 3.5);
        assert!(final_theta(100, 0.2, 1.0, 0.5).is_err());
    }

    #[test]
    fn isolated_nodes_have_unit_reachability() {
        let g = build_layered_graph(&four_layers());
        let model = TriggeringModel::independent_cascade_uniform(g, 0.0).unwrap();
        for mode in [EstimationMode::Individual, EstimationMode::Shapley] {
            let mut cfg = EstimatorConfig::new(Reachability, mode);
            cfg.epsilon = 0.2;
            cfg.seed = 3;
            let (r, trace) = estimate(&model, &cfg).unwrap();
            assert!(r.values.iter().all(|v| (v - 1.0).abs() <= 0.2), "{:?}", r.values);
            assert_eq!(trace.lower_bound, 1.0);
            assert!((trace.mean_rr_size - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn certain_layers_within_bounds() {
        let g = build_layered_graph(&four_layers());
        let model = TriggeringModel::bfs_instance(g);
        let exact = exact_influence_centrality(&model, Reachability.into(), &CentralityMode::Individual).unwrap();
        let mut cfg = EstimatorConfig::new(Reachability, EstimationMode::Individual);
        cfg.epsilon = 0.2;
        let (r, _) = estimate(&model, &cfg).unwrap();
        assert!(within_error_bounds(&r.values, &exact.values, 0.2, 1).unwrap(), "{:?}", r.values);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let g = DirectedGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let model = TriggeringModel::independent_cascade_uniform(g, 0.5).unwrap();
        let mut cfg = EstimatorConfig::new(Harmonic, EstimationMode::Shapley);
        cfg.epsilon = 0.3;
        cfg.seed = 9;
        let (a, _) = estimate(&model, &cfg).unwrap();
        cfg.workers = 3;
        let (b, _) = estimate(&model, &cfg).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn group_mode_and_validation() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let model = TriggeringModel::bfs_instance(g);
        let mut cfg = EstimatorConfig::new(Reachability, EstimationMode::Group(vec![vec![0], vec![2, 3]]));
        cfg.epsilon = 0.2;
        let (r, _) = estimate(&model, &cfg).unwrap();
        assert!((r.values[0] - 4.0).abs() <= 0.8);
        assert!((r.values[1] - 2.0).abs() <= 0.4);

        cfg.k = 3;
        assert!(estimate(&model, &cfg).is_err());
        let mut cfg = EstimatorConfig::new(Reachability, EstimationMode::Individual);
        cfg.epsilon = 0.0;
        assert!(matches!(estimate(&model, &cfg), Err(Error::InvalidConfig(_))));
        let mut cfg = EstimatorConfig::new(Reachability, EstimationMode::Individual);
        cfg.max_rr_sets = 10;
        assert!(matches!(estimate(&model, &cfg), Err(Error::BudgetExceeded { .. })));
    }
}
