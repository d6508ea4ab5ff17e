use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{DiamondStructure, WeightedGraph};

use super::{shortest_path_tree, Tolerance};

/// Cycle made of two internally disjoint bottom-to-top geodesics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bigon {
    /// Vertices in cyclic order, starting at the bottom.
    pub cycle: Vec<usize>,
    /// Total length of the cycle.
    pub length: f64,
    /// Whether distances along the cycle equal distances in the graph.
    pub isometric: bool,
}

/// Bottom-to-top path through the first-level subdiamonds `first` and
/// `second`, then always through the `a`-side below that.
fn side_path(st: &DiamondStructure, first: usize, second: usize) -> Vec<usize> {
    fn descend(st: &DiamondStructure, node: usize, out: &mut Vec<usize>) {
        let s = &st.subdiamonds[node];
        if s.children.is_empty() {
            out.push(s.top);
        } else {
            descend(st, s.children[0], out);
            descend(st, s.children[1], out);
        }
    }
    let root = st.root();
    let mut out = vec![root.bottom];
    descend(st, root.children[first], &mut out);
    descend(st, root.children[second], &mut out);
    out
}

/// The `a`-side and `b`-side geodesics of a diamond joined into one cycle of
/// `2^(level+1)` edges, together with an exhaustive isometry check.
pub fn geodesic_bigon(st: &DiamondStructure, g: &WeightedGraph) -> Result<Bigon> {
    if st.level == 0 {
        return Err(Error::InvalidParameter("a level-0 diamond has no cycle".into()));
    }
    if st.n_vertices() != g.n_vertices() {
        return Err(Error::SizeMismatch {
            expected: st.n_vertices(),
            actual: g.n_vertices(),
        });
    }
    let up = side_path(st, 0, 1);
    let down = side_path(st, 2, 3);
    let mut cycle = up.clone();
    cycle.extend(down.iter().rev().skip(1).take(down.len() - 2));

    let edge_weight = |x: usize, y: usize| {
        g.neighbors(x)
            .iter()
            .filter(|&&(z, _)| z == y)
            .map(|&(_, ei)| g.edges()[ei].w)
            .fold(f64::INFINITY, f64::min)
    };
    let len = cycle.len();
    // prefix[i] = length along the cycle from cycle[0] to cycle[i]
    let mut prefix = vec![0.0; len + 1];
    for i in 0..len {
        let w = edge_weight(cycle[i], cycle[(i + 1) % len]);
        if w.is_infinite() {
            return Err(Error::InvalidParameter(format!(
                "vertices {} and {} are not adjacent",
                cycle[i],
                cycle[(i + 1) % len]
            )));
        }
        prefix[i + 1] = prefix[i] + w;
    }
    let length = prefix[len];
    let tol = Tolerance::default();
    let mut isometric = true;
    'outer: for i in 0..len {
        let (dist, _) = shortest_path_tree(g, cycle[i], tol);
        for j in i + 1..len {
            let along = prefix[j] - prefix[i];
            if !tol.eq(dist[cycle[j]], along.min(length - along)) {
                isometric = false;
                break 'outer;
            }
        }
    }
    Ok(Bigon { cycle, length, isometric })
}
