use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::graph::Distance;

/// Scalar `g` of an additive distance function `f(d) = Σ_u g(d_u)`.
/// Every variant has `g(inf) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum NodeWiseFunction {
    /// 1 at distance exactly 1.
    Degree,
    /// `1/d` for `d > 0`, 0 at the node itself.
    Harmonic,
    /// 1 at every finite distance.
    Reachability,
    /// 1 for `d <= δ`, the node itself included.
    SphereOfInfluence(u32),
}

impl NodeWiseFunction {
    #[inline]
    pub fn eval(self, d: Distance) -> f64 {
        let Distance::Finite(d) = d else { return 0.0 };
        match self {
            NodeWiseFunction::Degree => (d == 1) as u8 as f64,
            NodeWiseFunction::Harmonic => {
                if d == 0 {
                    0.0
                } else {
                    1.0 / d as f64
                }
            }
            NodeWiseFunction::Reachability => 1.0,
            NodeWiseFunction::SphereOfInfluence(delta) => (d <= delta) as u8 as f64,
        }
    }

    #[inline]
    pub fn eval_level(self, level: u32) -> f64 {
        self.eval(Distance::Finite(level))
    }
}

impl fmt::Display for NodeWiseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeWiseFunction::Degree => f.write_str("deg"),
            NodeWiseFunction::Harmonic => f.write_str("har"),
            NodeWiseFunction::Reachability => f.write_str("rch"),
            NodeWiseFunction::SphereOfInfluence(d) => write!(f, "soi({d})"),
        }
    }
}

/// `f` applied to a whole distance vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DistanceFunction {
    Additive(NodeWiseFunction),
    /// `1 / Σ_u d_u`, and 0 when some node is unreachable.
    Closeness,
}

impl DistanceFunction {
    pub fn eval(&self, d: &[Distance]) -> f64 {
        match self {
            DistanceFunction::Additive(g) => d.iter().map(|&x| g.eval(x)).sum(),
            DistanceFunction::Closeness => {
                let mut total: u64 = 0;
                for x in d {
                    match x {
                        Distance::Finite(x) => total += *x as u64,
                        Distance::Inf => return 0.0,
                    }
                }
                // a lone node (or a group covering V) has nothing to be close to
                if total == 0 {
                    0.0
                } else {
                    1.0 / total as f64
                }
            }
        }
    }

    pub fn as_additive(&self) -> Option<NodeWiseFunction> {
        match self {
            DistanceFunction::Additive(g) => Some(*g),
            DistanceFunction::Closeness => None,
        }
    }

    /// The built-in functions, with soi at the given δ.
    pub fn builtins(delta: u32) -> [DistanceFunction; 5] {
        [
            DistanceFunction::Additive(NodeWiseFunction::Degree),
            DistanceFunction::Additive(NodeWiseFunction::Harmonic),
            DistanceFunction::Additive(NodeWiseFunction::Reachability),
            DistanceFunction::Additive(NodeWiseFunction::SphereOfInfluence(delta)),
            DistanceFunction::Closeness,
        ]
    }
}

impl From<NodeWiseFunction> for DistanceFunction {
    fn from(g: NodeWiseFunction) -> Self {
        DistanceFunction::Additive(g)
    }
}

impl fmt::Display for DistanceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceFunction::Additive(g) => g.fmt(f),
            DistanceFunction::Closeness => f.write_str("cls"),
        }
    }
}

impl FromStr for DistanceFunction {
    type Err = Error;

    /// Accepts `deg`, `har`, `rch`, `cls`, and `soi(δ)` or `soi:δ`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let g = match s {
            "deg" => NodeWiseFunction::Degree,
            "har" => NodeWiseFunction::Harmonic,
            "rch" => NodeWiseFunction::Reachability,
            "cls" => return Ok(DistanceFunction::Closeness),
            "soi" => return Err(Error::InvalidConfig("soi requires a threshold δ".into())),
            _ => {
                let delta = s
                    .strip_prefix("soi(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| s.strip_prefix("soi:"))
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown centrality function `{s}`")))?;
                let delta: u32 = delta
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("invalid soi threshold `{delta}`")))?;
                if delta == 0 {
                    return Err(Error::InvalidConfig("soi threshold must be positive".into()));
                }
                NodeWiseFunction::SphereOfInfluence(delta)
            }
        };
        Ok(DistanceFunction::Additive(g))
    }
}
