//! Chains of finite metric spaces joined by paths between base points.

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Tolerance};

use super::{Edge, WeightedGraph};

#[derive(Debug, Clone)]
pub struct GluedSpace {
    /// Each block with its base point.
    pub blocks: Vec<(MetricSpace, usize)>,
    /// Number of unit edges of the path joining base point `n` to `n + 1`.
    pub path_lengths: Vec<u64>,
    pub combined: WeightedGraph,
    /// Combined vertex of every block-local point.
    pub block_offsets: Vec<Vec<usize>>,
    /// Combined vertices of path `n`, from base point `n` to base point `n + 1`.
    pub paths: Vec<Vec<usize>>,
}

impl GluedSpace {
    pub fn base_vertex(&self, block: usize) -> usize {
        self.block_offsets[block][self.blocks[block].1]
    }

    /// Distance along the chain from the first base point to base point `n`.
    pub fn shift(&self, block: usize) -> u64 {
        self.path_lengths[..block].iter().sum()
    }
}

/// Realizes every block as a complete graph weighted by its distances and
/// joins consecutive base points with unit-edge paths. Block vertices come
/// first, in block order, followed by the interior path vertices.
pub fn glue(blocks: Vec<(MetricSpace, usize)>, path_lengths: Vec<u64>) -> Result<GluedSpace> {
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("nothing to glue".into()));
    }
    if path_lengths.len() + 1 != blocks.len() {
        return Err(Error::SizeMismatch {
            expected: blocks.len() - 1,
            actual: path_lengths.len(),
        });
    }
    let tol = Tolerance::default();
    for (i, (space, base)) in blocks.iter().enumerate() {
        if space.n_points() == 0 {
            return Err(Error::InvalidParameter(format!("block {i} is empty")));
        }
        if *base >= space.n_points() {
            return Err(Error::VertexOutOfRange {
                vertex: *base,
                n: space.n_points(),
            });
        }
    }
    for (i, &len) in path_lengths.iter().enumerate() {
        let need = blocks[i].0.diameter().max(blocks[i + 1].0.diameter());
        if len == 0 || !tol.le(need, len as f64) {
            return Err(Error::InvalidParameter(format!(
                "path {i} has length {len}, below the required {need}"
            )));
        }
    }

    let mut edges = Vec::new();
    let mut labels = Vec::new();
    let mut block_offsets = Vec::with_capacity(blocks.len());
    for (b, (space, _)) in blocks.iter().enumerate() {
        let start = labels.len();
        let k = space.n_points();
        for i in 0..k {
            labels.push(format!("b{b}:{}", space.label(i)));
            for j in i + 1..k {
                edges.push(Edge {
                    u: start + i,
                    v: start + j,
                    w: space.d(i, j),
                });
            }
        }
        block_offsets.push((start..start + k).collect::<Vec<_>>());
    }
    let mut paths = Vec::with_capacity(path_lengths.len());
    for (p, &len) in path_lengths.iter().enumerate() {
        let from = block_offsets[p][blocks[p].1];
        let to = block_offsets[p + 1][blocks[p + 1].1];
        let mut path = vec![from];
        for j in 1..len {
            path.push(labels.len());
            labels.push(format!("p{p}:{j}"));
        }
        path.push(to);
        for w in path.windows(2) {
            edges.push(Edge { u: w[0], v: w[1], w: 1.0 });
        }
        paths.push(path);
    }
    let combined = WeightedGraph::new(labels.len(), edges)?.with_labels(labels)?;
    Ok(GluedSpace {
        blocks,
        path_lengths,
        combined,
        block_offsets,
        paths,
    })
}
