use crate::error::{Error, Result};
use crate::graphs::{DihedralElement, WeightedGraph};

use super::{Embedding, Norm};

/// Coset-interleaving map of the infinite dihedral group into the line:
/// `x^k -> k` and `g x^k -> k + 1/2`. Vertices are identified through their
/// labels, as produced by [`crate::graphs::dinfinity_ball`].
pub fn dinfinity_phi(ball: &WeightedGraph) -> Result<Embedding> {
    let coords = (0..ball.n_vertices())
        .map(|v| {
            let label = ball
                .labels()
                .get(v)
                .ok_or_else(|| Error::Format(format!("vertex {v} has no label")))?;
            let el = DihedralElement::parse(label).ok_or_else(|| Error::Format(format!("{label:?} is not a dihedral group element")))?;
            Ok(el.power as f64 + if el.flip { 0.5 } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    Embedding::new(Norm::L2, 1, coords)?.with_labels(ball.labels().to_vec())
}
