//! Weighted graphs and the families of test-spaces built on them.
//!
//! Every family is produced as an immutable [`WeightedGraph`]: a vertex count,
//! an edge list with strictly positive weights and optional vertex labels.
//! Diamonds additionally carry a [`diamond::DiamondStructure`] describing the
//! lineage of every vertex and edge.

pub mod diamond;
pub mod dihedral;
pub mod families;
pub mod glue;
pub mod io;
pub mod series_parallel;

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_rational::BigRational;

use crate::error::{Error, Result};

pub use diamond::{build_diamond, build_weighted_diamond, build_weighted_diamond_exact, DiamondStructure};
pub use dihedral::{dinfinity_ball, DihedralElement};
pub use families::{build_binary_tree, build_cycle, build_path};
pub use glue::{glue, GluedSpace};
pub use series_parallel::{generate_series_parallel, is_series_parallel, Removal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected graph with positive edge weights.
///
/// `exact` optionally carries the same weights as rationals; it is populated by
/// the exact-rational weighted diamond constructor and by JSON files whose
/// weights are written as `"p/q"` strings.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    labels: Vec<String>,
    exact: Option<Vec<BigRational>>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges && self.labels == other.labels && self.exact == other.exact
    }
}

impl WeightedGraph {
    /// Builds a graph, rejecting self-loops, non-positive or non-finite weights
    /// and out-of-range endpoints.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if e.u == e.v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {}", e.u)));
            }
            if !(e.w.is_finite() && e.w > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "edge {}-{} has non-positive weight {}",
                    e.u, e.v, e.w
                )));
            }
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        Ok(Self {
            n,
            edges,
            labels: Vec::new(),
            exact: None,
            adjacency,
        })
    }

    /// Unit-weight graph from endpoint pairs.
    pub fn unit(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, pairs.into_iter().map(|(u, v)| Edge { u, v, w: 1.0 }).collect())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if !labels.is_empty() && labels.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_exact_weights(mut self, weights: Vec<BigRational>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::SizeMismatch {
                expected: self.edges.len(),
                actual: weights.len(),
            });
        }
        let zero = BigRational::from_integer(0.into());
        if weights.iter().any(|w| *w <= zero) {
            return Err(Error::InvalidParameter("exact weights must be positive".into()));
        }
        self.exact = Some(weights);
        Ok(self)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Label of `v`, falling back to its index.
    pub fn label(&self, v: usize) -> String {
        self.labels.get(v).cloned().unwrap_or_else(|| v.to_string())
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn exact_weights(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// Neighbours of `v` as `(neighbour, edge index)` pairs, in edge order.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Breadth-first hop distances from `source`, skipping vertices for which
    /// `blocked` returns true. Unreachable vertices get `usize::MAX`.
    pub fn hop_distances_avoiding(&self, source: usize, blocked: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        if blocked(source) {
            return dist;
        }
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if dist[y] == usize::MAX && !blocked(y) {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn hop_distances(&self, source: usize) -> Vec<usize> {
        self.hop_distances_avoiding(source, |_| false)
    }

    /// Connected components of the subgraph induced by the vertices `keep`
    /// accepts, each sorted ascending, ordered by smallest member.
    pub fn components_where(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] || !keep(s) {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &(y, _) in &self.adjacency[x] {
                    if !seen[y] && keep(y) {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components_where(|_| true).len() == 1
    }

    /// Graphviz rendering; edge labels carry weights unless all are 1.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let unit = self.edges.iter().all(|e| e.w == 1.0);
        let _ = writeln!(out, "graph \"{}\" {{", name.replace('"', "'"));
        for v in 0..self.n {
            let _ = writeln!(out, "  {} [label=\"{}\"];", v, self.label(v).replace('"', "'"));
        }
        for e in &self.edges {
            if unit {
                let _ = writeln!(out, "  {} -- {};", e.u, e.v);
            } else {
                let _ = writeln!(out, "  {} -- {} [label=\"{}\"];", e.u, e.v, e.w);
            }
        }
        out.push_str("}\n");
        out
    }
}
