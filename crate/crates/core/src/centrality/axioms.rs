use super::{exact_influence_centrality, CentralityMode, DistanceFunction};
use crate::error::{Error, Result};
use crate::model::TriggeringModel;
use crate::profile::{exact_profile, profile_centrality, SequenceIndex};
use crate::NodeId;

pub const AXIOM_TOLERANCE: f64 = 1e-9;

/// `ψ_v(I) = ψ_{π(v)}(π(I))` for every node.
pub fn check_anonymity(model: &TriggeringModel, f: DistanceFunction, perm: &[NodeId]) -> Result<bool> {
    let moved = model.relabel(perm)?;
    let before = exact_influence_centrality(model, f, &CentralityMode::Individual)?.values;
    let after = exact_influence_centrality(&moved, f, &CentralityMode::Individual)?.values;
    Ok(before.iter().enumerate().all(|(v, x)| (x - after[perm[v]]).abs() <= AXIOM_TOLERANCE))
}

/// Centrality of the mixture `α·I₁ + (1−α)·I₂` equals the mixture of
/// centralities. The mixture exists only as an influence profile, so the
/// left side is read off the mixed profile.
pub fn check_bayesian(m1: &TriggeringModel, m2: &TriggeringModel, alpha: f64, f: DistanceFunction) -> Result<bool> {
    let n = m1.node_count();
    if m2.node_count() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m2.node_count() });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("mixing weight {alpha} is outside [0, 1]")));
    }
    let index = SequenceIndex::new(n)?;
    let mixed = exact_profile(m1, &index)?.mix(&exact_profile(m2, &index)?, alpha)?;
    let lhs = profile_centrality(&mixed, &index, f, &CentralityMode::Individual)?;
    let c1 = exact_influence_centrality(m1, f, &CentralityMode::Individual)?.values;
    let c2 = exact_influence_centrality(m2, f, &CentralityMode::Individual)?.values;
    Ok(lhs
        .iter()
        .zip(c1.iter().zip(&c2))
        .all(|(l, (a, b))| (l - (alpha * a + (1.0 - alpha) * b)).abs() <= AXIOM_TOLERANCE))
}
