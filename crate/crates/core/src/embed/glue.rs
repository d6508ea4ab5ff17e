use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graphs::io::{Built, Family};
use crate::graphs::GluedSpace;
use crate::metric::Tolerance;

use super::diamond::embed_structure;
use super::{dinfinity_phi, distortion, Embedding, Norm};

/// A nonexpansive Euclidean embedding of a built family, used for glue blocks:
/// paths on the line, cycles as regular polygons with unit sides, trees by
/// summing one unit vector per edge on the root path, weighted diamonds by
/// their edge-isometric embedding and dihedral balls by the coset map.
pub fn block_embedding(family: &Family, built: &Built) -> Result<Embedding> {
    let g = &built.graph;
    let n = g.n_vertices();
    let e = match family {
        Family::Path { .. } => Embedding::new(Norm::L2, 1, (0..n).map(|i| i as f64).collect())?,
        Family::Cycle { .. } => {
            let radius = 0.5 / (PI / n as f64).sin();
            let coords = (0..n)
                .flat_map(|i| {
                    let t = 2.0 * PI * i as f64 / n as f64;
                    [radius * t.cos(), radius * t.sin()]
                })
                .collect();
            Embedding::new(Norm::L2, 2, coords)?
        }
        Family::Tree { .. } => {
            // heap order: vertex v > 0 hangs below (v - 1) / 2 through edge v - 1
            let dim = (n - 1).max(1);
            let mut coords = vec![0.0; n * dim];
            for v in 1..n {
                let parent = (v - 1) / 2;
                for c in 0..dim {
                    coords[v * dim + c] = coords[parent * dim + c];
                }
                coords[v * dim + v - 1] = 1.0;
            }
            Embedding::new(Norm::L2, dim, coords)?
        }
        Family::Wdiamond { eps, .. } => {
            let st = built
                .structure
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("weighted diamond without structure".into()))?;
            embed_structure(st, *eps)?
        }
        Family::Dinfty { .. } => dinfinity_phi(g)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "no built-in embedding for {} blocks",
                serde_json::to_value(other)?["kind"]
            )))
        }
    };
    e.with_labels(g.labels().to_vec())
}

/// Embeds a glued chain given nonexpansive embeddings of its blocks.
///
/// Each block embedding is translated so that its base point sits at the
/// origin and placed in the leading coordinates; a fresh last coordinate
/// carries the shift of the block along the chain (the total length of the
/// paths before it). Path vertices lie on that last axis at unit spacing, so
/// the result is nonexpansive as well.
pub fn glue_embed(blocks: &[Embedding], glued: &GluedSpace) -> Result<Embedding> {
    if blocks.len() != glued.blocks.len() {
        return Err(Error::SizeMismatch {
            expected: glued.blocks.len(),
            actual: blocks.len(),
        });
    }
    let norm = blocks[0].norm();
    let tol = Tolerance::default();
    for (i, (e, (space, base))) in blocks.iter().zip(&glued.blocks).enumerate() {
        if e.norm() != norm {
            return Err(Error::InvalidParameter(format!("block {i} uses a different host norm")));
        }
        let r = distortion(e, space)?;
        if !tol.le(r.lip, 1.0) {
            return Err(Error::InvalidParameter(format!(
                "block {i} embedding expands distances (lip = {})",
                r.lip
            )));
        }
        // translation is exact up to rounding; anything else means a bad base index
        if *base >= e.n_points() {
            return Err(Error::VertexOutOfRange {
                vertex: *base,
                n: e.n_points(),
            });
        }
    }
    let dim = blocks.iter().map(Embedding::dim).max().unwrap_or(0) + 1;
    let n = glued.combined.n_vertices();
    let mut coords = vec![0.0; n * dim];
    for (b, (e, (_, base))) in blocks.iter().zip(&glued.blocks).enumerate() {
        let origin = e.point(*base).to_vec();
        let shift = glued.shift(b) as f64;
        for (local, &v) in glued.block_offsets[b].iter().enumerate() {
            for (c, (x, o)) in e.point(local).iter().zip(&origin).enumerate() {
                coords[v * dim + c] = x - o;
            }
            coords[v * dim + dim - 1] = shift;
        }
        let placed = &coords[glued.base_vertex(b) * dim..glued.base_vertex(b) * dim + dim - 1];
        if placed.iter().any(|&x| x != 0.0) {
            return Err(Error::InvalidParameter(format!("block {b} base point not at the origin")));
        }
    }
    for (p, path) in glued.paths.iter().enumerate() {
        let shift = glued.shift(p) as f64;
        for (j, &v) in path.iter().enumerate().skip(1).take(path.len().saturating_sub(2)) {
            coords[v * dim + dim - 1] = shift + j as f64;
        }
    }
    Embedding::new(norm, dim, coords)?.with_labels(glued.combined.labels().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{embed_weighted_diamond, Norm};
    use crate::graphs::{build_cycle, build_path, glue};
    use crate::metric::shortest_path_metric;

    fn line(n: usize) -> (crate::metric::MetricSpace, Embedding) {
        let m = shortest_path_metric(&build_path(n).unwrap()).unwrap();
        let e = Embedding::new(Norm::L2, 1, (0..=n).map(|i| i as f64).collect()).unwrap();
        (m, e)
    }

    #[test]
    fn single_block_unchanged() {
        let (m, e) = line(3);
        let s = glue(vec![(m, 0)], vec![]).unwrap();
        let f = glue_embed(&[e], &s).unwrap();
        let r = distortion(&f, &shortest_path_metric(&s.combined).unwrap()).unwrap();
        assert_eq!(r.distortion, 1.0);
    }

    #[test]
    fn two_blocks_within_bound() {
        let (m1, e1) = line(2);
        let (g, _, e2) = embed_weighted_diamond(2, 0.25).unwrap();
        let m2 = shortest_path_metric(&g).unwrap();
        let c = distortion(&e2, &m2).unwrap().lip_inv;
        let len = m1.diameter().max(m2.diameter()).ceil() as u64;
        let s = glue(vec![(m1, 1), (m2, 3)], vec![len]).unwrap();
        let f = glue_embed(&[e1, e2], &s).unwrap();
        let r = distortion(&f, &shortest_path_metric(&s.combined).unwrap()).unwrap();
        assert!(r.lip <= 1.0 + 1e-9);
        assert!(r.lip_inv <= 4.0 * c.max(1.0));
    }

    #[test]
    fn block_embeddings_are_nonexpansive() {
        for spec in ["path:4", "cycle:5", "cycle:3", "tree:0", "tree:3", "wdiamond:2:0.25", "dinfty:3"] {
            let f: Family = spec.parse().unwrap();
            let built = f.build().unwrap();
            let e = block_embedding(&f, &built).unwrap();
            let r = distortion(&e, &shortest_path_metric(&built.graph).unwrap()).unwrap();
            assert!(r.lip <= 1.0 + 1e-9, "{spec}: {}", r.lip);
            assert!(r.lip_inv.is_finite(), "{spec}");
        }
        let f: Family = "diamond:2".parse().unwrap();
        assert!(block_embedding(&f, &f.build().unwrap()).is_err());
    }

    #[test]
    fn expanding_block_rejected() {
        let m = shortest_path_metric(&build_cycle(4).unwrap()).unwrap();
        let e = Embedding::new(Norm::L2, 1, vec![0.0, 2.0, 4.0, 6.0]).unwrap();
        let s = glue(vec![(m, 0)], vec![]).unwrap();
        assert!(glue_embed(&[e], &s).is_err());
    }
}
