use crate::error::{Error, Result};

use super::{Edge, WeightedGraph};

/// Binary tree of the given depth. Vertices are the 0/1 words of length at
/// most `depth` in heap order (the root is the empty word, vertex `i` has
/// children `2i + 1` and `2i + 2` obtained by appending `0` and `1`).
pub fn build_binary_tree(depth: u32) -> Result<WeightedGraph> {
    if depth > 24 {
        return Err(Error::InvalidParameter(format!("tree depth {depth} is too large")));
    }
    let n = (1usize << (depth + 1)) - 1;
    let mut labels = Vec::with_capacity(n);
    labels.push(String::new());
    let mut pairs = Vec::with_capacity(n.saturating_sub(1));
    for child in 1..n {
        let parent = (child - 1) / 2;
        let bit = if child % 2 == 1 { '0' } else { '1' };
        let mut word = labels[parent].clone();
        word.push(bit);
        labels.push(word);
        pairs.push((parent, child));
    }
    WeightedGraph::unit(n, pairs)?.with_labels(labels)
}

pub fn build_cycle(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("a cycle needs at least 3 vertices, got {n}")));
    }
    WeightedGraph::unit(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Path with `n` unit edges (and `n + 1` vertices).
pub fn build_path(n: usize) -> Result<WeightedGraph> {
    if n < 1 {
        return Err(Error::InvalidParameter("a path needs at least one edge".into()));
    }
    WeightedGraph::unit(n + 1, (0..n).map(|i| (i, i + 1)))
}

/// Cartesian product of graphs: tuples of vertices, the last factor varying
/// fastest, joined when they differ in one coordinate along an edge of that
/// factor. Its path metric is the sum of the factor metrics.
pub fn cartesian_product(factors: &[WeightedGraph], cap: usize) -> Result<WeightedGraph> {
    if factors.is_empty() {
        return Err(Error::InvalidParameter("product of no graphs".into()));
    }
    let mut n = 1usize;
    for f in factors {
        n = n
            .checked_mul(f.n_vertices())
            .filter(|&size| size <= cap)
            .ok_or(Error::TooLarge { size: usize::MAX, cap })?;
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty factor".into()));
    }
    // stride of factor i: product of the sizes after it
    let mut strides = vec![1usize; factors.len()];
    for i in (0..factors.len() - 1).rev() {
        strides[i] = strides[i + 1] * factors[i + 1].n_vertices();
    }
    let mut edges = Vec::new();
    for x in 0..n {
        for (f, &stride) in factors.iter().zip(&strides) {
            let coord = x / stride % f.n_vertices();
            for &(y, e) in f.neighbors(coord) {
                if y > coord {
                    edges.push(Edge {
                        u: x,
                        v: x + (y - coord) * stride,
                        w: f.edges()[e].w,
                    });
                }
            }
        }
    }
    let labels = (0..n)
        .map(|x| {
            let parts: Vec<String> = factors
                .iter()
                .zip(&strides)
                .map(|(f, &stride)| f.label(x / stride % f.n_vertices()))
                .collect();
            format!("({})", parts.join(","))
        })
        .collect();
    WeightedGraph::new(n, edges)?.with_labels(labels)
}
