//! Series-parallel graphs: a seeded generator following the attach-a-vertex
//! construction, and recognition by series/parallel reduction.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::WeightedGraph;

/// Edges removed at the end of the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Removal {
    None,
    /// Explicit edge indices into the grown graph.
    Mask(Vec<usize>),
    /// Each edge independently with this probability; redrawn when the result
    /// is disconnected.
    Probability(f64),
}

pub const REMOVAL_RETRIES: usize = 100;

/// Grows a series-parallel graph from a single edge.
///
/// Each step draws an existing edge `uv` uniformly (ChaCha8 stream seeded with
/// `seed`, `gen_range` over the current edge list) and adds a new vertex `w`
/// with edges `uw` and `wv`. The removal stage then deletes edges, keeping the
/// graph connected.
pub fn generate_series_parallel(steps: usize, removal: &Removal, seed: u64) -> Result<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = vec![(0usize, 1usize)];
    for step in 0..steps {
        let (u, v) = edges[rng.gen_range(0..edges.len())];
        let w = step + 2;
        edges.push((u, w));
        edges.push((w, v));
    }
    let n = steps + 2;
    let full = WeightedGraph::unit(n, edges.iter().copied())?;
    match removal {
        Removal::None => Ok(full),
        Removal::Mask(mask) => {
            if let Some(&bad) = mask.iter().find(|&&i| i >= edges.len()) {
                return Err(Error::InvalidParameter(format!(
                    "removal index {bad} out of range for {} edges",
                    edges.len()
                )));
            }
            let drop: BTreeSet<usize> = mask.iter().copied().collect();
            let kept = edges.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, &e)| e);
            let g = WeightedGraph::unit(n, kept)?;
            if !g.is_connected() {
                return Err(Error::InvalidParameter("edge removal disconnects the graph".into()));
            }
            Ok(g)
        }
        Removal::Probability(p) => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidParameter(format!("removal probability {p} outside [0, 1]")));
            }
            for _ in 0..REMOVAL_RETRIES {
                let kept: Vec<_> = edges.iter().copied().filter(|_| !rng.gen_bool(*p)).collect();
                let g = WeightedGraph::unit(n, kept)?;
                if g.is_connected() {
                    return Ok(g);
                }
            }
            Err(Error::InvalidParameter(format!(
                "edge removal disconnected the graph in all {REMOVAL_RETRIES} attempts"
            )))
        }
    }
}

/// True iff the connected graph reduces to a single vertex or edge by deleting
/// loops, merging parallel edges, deleting degree-1 vertices and smoothing
/// degree-2 vertices; equivalently, it has no `K4` minor.
///
/// Works on adjacency sets, which merge parallel edges implicitly; smoothing
/// `w` with neighbours `u != v` never creates a loop.
pub fn is_series_parallel(g: &WeightedGraph) -> bool {
    let n = g.n_vertices();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for e in g.edges() {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut work: Vec<usize> = (0..n).filter(|&v| adj[v].len() <= 2).collect();
    while let Some(w) = work.pop() {
        if !alive[w] || remaining <= 2 || adj[w].len() > 2 {
            continue;
        }
        let nbrs: Vec<usize> = adj[w].iter().copied().collect();
        for &x in &nbrs {
            adj[x].remove(&w);
        }
        adj[w].clear();
        alive[w] = false;
        remaining -= 1;
        if let [u, v] = nbrs[..] {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        for x in nbrs {
            if adj[x].len() <= 2 {
                work.push(x);
            }
        }
    }
    remaining <= 2
}
