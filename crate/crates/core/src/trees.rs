//! Enumeration of unlabeled (free) trees up to isomorphism.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graphs::WeightedGraph;

pub const MAX_TREE_VERTICES: usize = 16;

/// Parent-array tree used during enumeration; vertex 0 has no parent.
type Parents = Vec<usize>;

fn adjacency(parents: &Parents) -> Vec<Vec<usize>> {
    let n = parents.len();
    let mut adj = vec![Vec::new(); n];
    for (v, &p) in parents.iter().enumerate().skip(1) {
        adj[v].push(p);
        adj[p].push(v);
    }
    adj
}

/// One or two central vertices, found by peeling leaves.
fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &w in &adj[leaf] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// Parenthesis encoding of the subtree at `v` with children sorted.
fn rooted_code(adj: &[Vec<usize>], v: usize, parent: Option<usize>) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| Some(w) != parent)
        .map(|&w| rooted_code(adj, w, Some(v)))
        .collect();
    kids.sort_unstable();
    format!("({})", kids.concat())
}

/// Isomorphism-invariant encoding: the smallest rooted code over the centres.
pub fn canonical_code(g: &WeightedGraph) -> Result<String> {
    let n = g.n_vertices();
    if n == 0 || g.n_edges() != n - 1 || !g.is_connected() {
        return Err(Error::InvalidParameter("graph is not a tree".into()));
    }
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).iter().map(|&(w, _)| w).collect()).collect();
    Ok(code_of(&adj))
}

fn code_of(adj: &[Vec<usize>]) -> String {
    centers(adj)
        .into_iter()
        .map(|c| rooted_code(adj, c, None))
        .min()
        .unwrap_or_default()
}

/// All trees on `n` vertices up to isomorphism, as unit-weight graphs, in
/// increasing order of canonical code.
pub fn unlabeled_trees(n: usize) -> Result<Vec<WeightedGraph>> {
    if n == 0 || n > MAX_TREE_VERTICES {
        return Err(Error::InvalidParameter(format!(
            "tree size must be in 1..={MAX_TREE_VERTICES}, got {n}"
        )));
    }
    let mut level: BTreeMap<String, Parents> = BTreeMap::new();
    level.insert(String::new(), vec![0]);
    for _ in 1..n {
        let mut next = BTreeMap::new();
        for parents in level.values() {
            for attach in 0..parents.len() {
                let mut grown = parents.clone();
                grown.push(attach);
                next.entry(code_of(&adjacency(&grown))).or_insert(grown);
            }
        }
        level = next;
    }
    level
        .into_values()
        .map(|parents| WeightedGraph::unit(parents.len(), parents.iter().enumerate().skip(1).map(|(v, &p)| (p, v))))
        .collect()
}
