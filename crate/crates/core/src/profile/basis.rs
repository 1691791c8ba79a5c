use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::linalg::{rank_mod_prime, rank_rational, to_rational, RANK_PRIME};
use super::{enumerate_layered_instances, layered_instance_vector, ProfileVector, SequenceIndex};
use crate::centrality::{exact_influence_centrality, CentralityMode, DistanceFunction};
use crate::error::{Error, Result};
use crate::graph::{build_layered_graph, LayeredGraphSpec};
use crate::model::TriggeringModel;

/// Largest `n` built without an explicit opt-in.
pub const DEFAULT_MAX_BASIS_NODES: usize = 4;
const PIVOT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub n: usize,
    /// Number of non-stationary sequences.
    pub m: usize,
    /// Number of nontrivial layered-graph specs.
    pub layered: usize,
    pub rank: usize,
    pub full_rank: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisDecomposition {
    pub specs: Vec<LayeredGraphSpec>,
    pub coefficients: Vec<f64>,
    /// Max-norm of `A·λ − P`.
    pub residual: f64,
    pub coefficient_sum: f64,
}

impl BasisDecomposition {
    /// `spec,coefficient` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["spec", "coefficient"])?;
        for (spec, c) in self.specs.iter().zip(&self.coefficients) {
            w.write_record([spec.to_string(), c.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// The layered-instance vectors of one vertex count, as the columns of an
/// `M × M` 0/1 matrix.
pub struct Basis {
    index: SequenceIndex,
    specs: Vec<LayeredGraphSpec>,
    columns: Vec<ProfileVector>,
    lu: OnceLock<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl Basis {
    /// Builds the basis for `n <= 4`, or `n = 5` when `allow_large` is set.
    pub fn new(n: usize, allow_large: bool) -> Result<Self> {
        let limit = if allow_large { super::MAX_PROFILE_NODES } else { DEFAULT_MAX_BASIS_NODES };
        if n > limit {
            return Err(Error::TooLarge(format!(
                "the layered basis is built for at most {limit} nodes, got {n}{}",
                if allow_large || n > super::MAX_PROFILE_NODES { "" } else { " (n = 5 needs an explicit opt-in)" }
            )));
        }
        let index = SequenceIndex::new(n)?;
        let specs = enumerate_layered_instances(n)?;
        let columns = specs
            .iter()
            .map(|s| layered_instance_vector(s, &index))
            .collect::<Result<Vec<_>>>()?;
        Ok(Basis { index, specs, columns, lu: OnceLock::new() })
    }

    pub fn index(&self) -> &SequenceIndex {
        &self.index
    }

    pub fn specs(&self) -> &[LayeredGraphSpec] {
        &self.specs
    }

    pub fn column(&self, j: usize) -> &ProfileVector {
        &self.columns[j]
    }

    /// Entry `(i, j)`: 1 iff spec `j` generates sequence `i`.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.columns[j].values()[i] as i64
    }

    fn integer_rows(&self) -> Vec<Vec<i64>> {
        let m = self.index.len();
        (0..m).map(|i| (0..self.specs.len()).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// Exact rank: modulo a prime first, over the rationals if that falls
    /// short.
    pub fn rank_check(&self) -> RankReport {
        let rows = self.integer_rows();
        let m = self.index.len();
        let mut rank = rank_mod_prime(&rows, RANK_PRIME);
        if rank < m.min(self.specs.len()) {
            rank = rank_rational(&to_rational(&rows));
        }
        RankReport {
            n: self.index.node_count(),
            m,
            layered: self.specs.len(),
            rank,
            full_rank: rank == m && self.specs.len() == m,
        }
    }

    fn lu(&self) -> &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn> {
        self.lu.get_or_init(|| {
            let m = self.index.len();
            DMatrix::from_fn(m, self.specs.len(), |i, j| self.columns[j].values()[i]).lu()
        })
    }

    /// Solves `Σ_B λ_B · vector(B) = profile`.
    pub fn decompose(&self, profile: &ProfileVector) -> Result<BasisDecomposition> {
        let m = self.index.len();
        if profile.node_count() != self.index.node_count() || profile.values().len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: profile.values().len() });
        }
        if self.specs.len() != m {
            return Err(Error::SingularBasis { rank: self.rank_check().rank, dim: m });
        }
        let lu = self.lu();
        let u = lu.u();
        if (0..m).any(|i| u[(i, i)].abs() < PIVOT_TOLERANCE) {
            return Err(Error::SingularBasis { rank: self.rank_check().rank, dim: m });
        }
        let b = DVector::from_column_slice(profile.values());
        let x = lu
            .solve(&b)
            .ok_or_else(|| Error::SingularBasis { rank: self.rank_check().rank, dim: m })?;
        let mut residual: f64 = 0.0;
        for i in 0..m {
            let row: f64 = (0..m).map(|j| self.columns[j].values()[i] * x[j]).sum();
            residual = residual.max((row - b[i]).abs());
        }
        let coefficients: Vec<f64> = x.iter().copied().collect();
        Ok(BasisDecomposition {
            specs: self.specs.clone(),
            coefficient_sum: coefficients.iter().sum(),
            coefficients,
            residual,
        })
    }

    /// Centralities of every basis instance and of the null instance.
    pub fn centralities(&self, f: DistanceFunction, mode: &CentralityMode) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let psi = |spec: &LayeredGraphSpec| -> Result<Vec<f64>> {
            let model = TriggeringModel::bfs_instance(build_layered_graph(spec));
            Ok(exact_influence_centrality(&model, f, mode)?.values)
        };
        let on_basis = self.specs.iter().map(psi).collect::<Result<Vec<_>>>()?;
        let null = psi(&LayeredGraphSpec::null(self.index.node_count()))?;
        Ok((on_basis, null))
    }

    /// `Σ_{∅≠S₀⊆R₀*} (−1)^{1+|S₀|} · vector(B)[Seq_{B*}(S₀)]` for `B* =
    /// specs[star]` and `B = specs[other]`.
    pub fn inclusion_exclusion(&self, star: usize, other: usize) -> i64 {
        let spec = &self.specs[star];
        let g = build_layered_graph(spec);
        let r0 = &spec.layers()[0];
        let mut total = 0;
        for sub in 1..1usize << r0.len() {
            let seeds: u64 = (0..r0.len()).filter(|i| sub >> i & 1 == 1).fold(0, |m, i| m | 1 << r0[i]);
            let seq = crate::graph::bfs_from_mask(&g, seeds);
            let i = self.index.position(&seq).expect("seeds in the first layer reach the second");
            let sign = if sub.count_ones() % 2 == 1 { 1 } else { -1 };
            total += sign * self.entry(i, other);
        }
        total
    }
}

pub fn basis_rank_check(n: usize, allow_large: bool) -> Result<RankReport> {
    Ok(Basis::new(n, allow_large)?.rank_check())
}

/// `Σ λ_B ψ(B) + (1 − Σ λ_B) ψ(null)`.
pub fn reconstruct_centrality(decomp: &BasisDecomposition, on_basis: &[Vec<f64>], null: &[f64]) -> Result<Vec<f64>> {
    if on_basis.len() != decomp.coefficients.len() {
        return Err(Error::DimensionMismatch { expected: decomp.coefficients.len(), found: on_basis.len() });
    }
    if let Some(bad) = on_basis.iter().find(|v| v.len() != null.len()) {
        return Err(Error::DimensionMismatch { expected: null.len(), found: bad.len() });
    }
    let mut out: Vec<f64> = null.iter().map(|x| (1.0 - decomp.coefficient_sum) * x).collect();
    for (lambda, psi) in decomp.coefficients.iter().zip(on_basis) {
        for (o, x) in out.iter_mut().zip(psi) {
            *o += lambda * x;
        }
    }
    Ok(out)
}
