//! Edge-list ingestion.
//!
//! One edge per line, `u v` or `u v w`, whitespace separated. Text after `#`
//! is ignored. Node ids are non-negative integers (the graph gets
//! `n = 1 + max id`) unless remapping is requested, in which case any token is
//! a label and labels get dense ids in order of first appearance.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeListFormat {
    /// Weights optional; when present on every line they are kept.
    Unweighted,
    /// Third column is an IC activation probability.
    IcWeighted,
    /// Third column is an LT influence weight.
    LtWeighted,
}

impl EdgeListFormat {
    fn requires_weight(self) -> bool {
        !matches!(self, EdgeListFormat::Unweighted)
    }
}

#[derive(Clone, Debug)]
pub struct EdgeList {
    pub graph: DirectedGraph,
    /// Per-edge weight in `graph.edges()` order.
    pub weights: Option<Vec<f64>>,
    /// Original label of every dense node id.
    pub labels: Vec<String>,
}

pub fn parse_edge_list<R: BufRead>(reader: R, format: EdgeListFormat) -> Result<EdgeList> {
    parse_edge_list_with(reader, format, false)
}

pub fn parse_edge_list_with<R: BufRead>(reader: R, format: EdgeListFormat, remap: bool) -> Result<EdgeList> {
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut lines_with_weight = 0usize;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut max_id: Option<usize> = None;

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `u v` or `u v w`, found {} fields", fields.len()),
            });
        }
        let mut node = |tok: &str| -> Result<usize> {
            if remap {
                let next = ids.len();
                let id = *ids.entry(tok.to_string()).or_insert_with(|| {
                    labels.push(tok.to_string());
                    next
                });
                Ok(id)
            } else {
                let id = tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid node id `{tok}`"),
                })?;
                max_id = Some(max_id.map_or(id, |m| m.max(id)));
                Ok(id)
            }
        };
        let u = node(fields[0])?;
        let v = node(fields[1])?;
        if let Some(tok) = fields.get(2) {
            let w: f64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid weight `{tok}`"),
            })?;
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::WeightOutOfRange { line: lineno, weight: w });
            }
            weights.push(w);
            lines_with_weight += 1;
        } else if format.requires_weight() {
            return Err(Error::Parse { line: lineno, message: "missing edge weight".into() });
        }
        if lines_with_weight != 0 && lines_with_weight != edges.len() + 1 {
            return Err(Error::Parse { line: lineno, message: "weights must be given on every line or none".into() });
        }
        edges.push((u, v, lineno));
    }

    let n = if remap { labels.len() } else { max_id.map_or(0, |m| m + 1) };
    if !remap {
        labels = (0..n).map(|v| v.to_string()).collect();
    }
    // Re-check duplicates here so the error can name the offending line.
    let mut seen = std::collections::HashSet::new();
    for &(u, v, lineno) in &edges {
        if u == v {
            return Err(Error::Parse { line: lineno, message: format!("self-loop on node {}", labels[u]) });
        }
        if !seen.insert((u, v)) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate edge ({}, {})", labels[u], labels[v]),
            });
        }
    }
    let graph = DirectedGraph::from_edges(n, edges.iter().map(|&(u, v, _)| (u, v)))?;
    let weights = if lines_with_weight > 0 { Some(weights) } else { None };
    Ok(EdgeList { graph, weights, labels })
}
