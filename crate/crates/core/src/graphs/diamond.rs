//! Diamond graphs `D_n` and weighted diamonds `W_n`.
//!
//! Both are generated from the same lineage: starting from a single edge
//! `bottom -> top`, every edge `u -> v` created at step `k - 1` is subdivided at
//! step `k` into the quadrilateral `u, a, v, b`, producing the four child edges
//! `u -> a`, `a -> v`, `u -> b`, `b -> v` (in that order). The first endpoint of
//! an edge is always the bottom of the subdiamond that grows out of it.
//!
//! `D_n` keeps only the step-`n` edges; `W_n` keeps the edges of every step,
//! the step-`k` edges weighted `(1/2 + eps)^k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Edge, WeightedGraph};

pub const MAX_LEVEL: u32 = 10;

pub const BOTTOM: usize = 0;
pub const TOP: usize = 1;

/// The part of a diamond that evolved from one edge of the lineage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subdiamond {
    /// Lineage path: `"r"` for the root edge, then one digit `0..=3` per
    /// subdivision.
    pub path: String,
    /// Step at which the originating edge was created.
    pub step: u32,
    pub bottom: usize,
    pub top: usize,
    /// Unweighted path length from bottom to top, `2^(level - step)`.
    pub height: u64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// The pair `(a, b)` created when the originating edge was subdivided.
    pub split: Option<(usize, usize)>,
    /// Sorted member vertices, top and bottom included.
    pub members: Vec<usize>,
    /// Index of the originating edge in the graph, when the graph retains it.
    pub diagonal: Option<usize>,
}

impl Subdiamond {
    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Members other than the two exits.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied().filter(move |&v| v != self.top && v != self.bottom)
    }

    /// Height exponent `h` with `height = 2^h`.
    pub fn height_exp(&self) -> u32 {
        self.height.trailing_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiamondStructure {
    pub level: u32,
    /// Weight parameter for weighted diamonds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Step at which each graph edge was created.
    pub edge_level: Vec<u32>,
    /// Step at which each vertex was created (0 for bottom and top).
    pub vertex_birth: Vec<u32>,
    /// Lineage tree in breadth-first order; index 0 is the whole diamond.
    pub subdiamonds: Vec<Subdiamond>,
    /// Generation counted from the last step: a vertex born at step `s` has
    /// generation `level - s + 1`. Bottom and top have none.
    pub generation: Vec<Option<u32>>,
}

impl DiamondStructure {
    pub fn n_vertices(&self) -> usize {
        self.vertex_birth.len()
    }

    pub fn root(&self) -> &Subdiamond {
        &self.subdiamonds[0]
    }

    /// Indices of lineage nodes created at `step`, in lineage order.
    pub fn nodes_at_step(&self, step: u32) -> std::ops::Range<usize> {
        let start = ((1usize << (2 * step)) - 1) / 3;
        start..start + (1usize << (2 * step))
    }
}

fn vertex_count(level: u32) -> usize {
    2 + 2 * (((1usize << (2 * level)) - 1) / 3)
}

fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::InvalidParameter(format!(
            "diamond level {level} exceeds the supported maximum {MAX_LEVEL}"
        )));
    }
    Ok(())
}

/// Lineage shared by `D_n` and `W_n`: vertex labels, births and the
/// subdiamond tree, with diagonals unset.
fn lineage(level: u32) -> (Vec<String>, Vec<u32>, Vec<Subdiamond>) {
    let nv = vertex_count(level);
    let mut labels = Vec::with_capacity(nv);
    labels.push("bottom".to_string());
    labels.push("top".to_string());
    let mut birth = vec![0u32, 0];
    let mut nodes = vec![Subdiamond {
        path: "r".into(),
        step: 0,
        bottom: BOTTOM,
        top: TOP,
        height: 1 << level,
        parent: None,
        children: Vec::new(),
        split: None,
        members: Vec::new(),
        diagonal: None,
    }];
    let mut frontier = 0..1usize;
    for step in 1..=level {
        let start = nodes.len();
        for id in frontier.clone() {
            let (u, v) = (nodes[id].bottom, nodes[id].top);
            let a = labels.len();
            let b = a + 1;
            labels.push(format!("{}a", nodes[id].path));
            labels.push(format!("{}b", nodes[id].path));
            birth.extend([step, step]);
            nodes[id].split = Some((a, b));
            for (digit, (bottom, top)) in [(u, a), (a, v), (u, b), (b, v)].into_iter().enumerate() {
                let child = nodes.len();
                nodes[id].children.push(child);
                nodes.push(Subdiamond {
                    path: format!("{}{}", nodes[id].path, digit),
                    step,
                    bottom,
                    top,
                    height: 1 << (level - step),
                    parent: Some(id),
                    children: Vec::new(),
                    split: None,
                    members: Vec::new(),
                    diagonal: None,
                });
            }
        }
        frontier = start..nodes.len();
    }
    for id in (0..nodes.len()).rev() {
        let mut members = vec![nodes[id].bottom, nodes[id].top];
        for &c in &nodes[id].children {
            members.extend_from_slice(&nodes[c].members);
        }
        members.sort_unstable();
        members.dedup();
        nodes[id].members = members;
    }
    (labels, birth, nodes)
}

fn structure(level: u32, birth: Vec<u32>, subdiamonds: Vec<Subdiamond>, edge_level: Vec<u32>) -> DiamondStructure {
    let generation = birth.iter().map(|&s| (s > 0).then(|| level - s + 1)).collect();
    DiamondStructure {
        level,
        eps: None,
        edge_level,
        vertex_birth: birth,
        subdiamonds,
        generation,
    }
}

/// Unit-weight diamond `D_level`.
pub fn build_diamond(level: u32) -> Result<(WeightedGraph, DiamondStructure)> {
    check_level(level)?;
    let (labels, birth, nodes) = lineage(level);
    let leaves_from = ((1usize << (2 * level)) - 1) / 3;
    let pairs: Vec<_> = nodes[leaves_from..].iter().map(|s| (s.bottom, s.top)).collect();
    let mut nodes = nodes;
    for (i, node) in nodes[leaves_from..].iter_mut().enumerate() {
        node.diagonal = Some(i);
    }
    let edge_level = vec![level; pairs.len()];
    let g = WeightedGraph::unit(labels.len(), pairs)?.with_labels(labels)?;
    Ok((g, structure(level, birth, nodes, edge_level)))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    Ok(())
}

/// Weighted diamond `W_level`: every lineage edge is kept, edges created at
/// step `k` weigh `(1/2 + eps)^k`. Edge `i` of the graph is lineage node `i`.
pub fn build_weighted_diamond(level: u32, eps: f64) -> Result<(WeightedGraph, DiamondStructure)> {
    check_eps(eps)?;
    check_level(level)?;
    let (labels, birth, mut nodes) = lineage(level);
    let ratio = 0.5 + eps;
    let edges: Vec<_> = nodes
        .iter()
        .map(|s| Edge {
            u: s.bottom,
            v: s.top,
            w: ratio.powi(s.step as i32),
        })
        .collect();
    let edge_level = nodes.iter().map(|s| s.step).collect();
    for (i, node) in nodes.iter_mut().enumerate() {
        node.diagonal = Some(i);
    }
    let g = WeightedGraph::new(labels.len(), edges)?.with_labels(labels)?;
    let mut st = structure(level, birth, nodes, edge_level);
    st.eps = Some(eps);
    Ok((g, st))
}

/// Parses `"p/q"`, an integer, or a terminating decimal such as `"0.25"` into
/// an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("cannot parse {s:?} as a rational"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let p: BigInt = digits.parse().map_err(|_| bad())?;
    let q = BigInt::from(10).pow(frac.len() as u32);
    let r = BigRational::new(p, q);
    Ok(if neg { -r } else { r })
}

/// Nearest double to an exact rational.
pub fn rational_to_f64(r: &BigRational) -> Result<f64> {
    r.to_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::InvalidParameter(format!("{r} is not representable as a double")))
}

/// Weighted diamond with exact rational weights alongside the floating ones.
pub fn build_weighted_diamond_exact(level: u32, eps: &BigRational) -> Result<(WeightedGraph, DiamondStructure)> {
    let half = BigRational::new(1.into(), 2.into());
    let zero = BigRational::from_integer(0.into());
    if !(*eps > zero && *eps < half) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let eps_f = eps
        .to_f64()
        .ok_or_else(|| Error::InvalidParameter("eps not representable".into()))?;
    let (g, st) = build_weighted_diamond(level, eps_f)?;
    let ratio = half + eps;
    let mut powers = vec![BigRational::one()];
    for k in 1..=level as usize {
        powers.push(&powers[k - 1] * &ratio);
    }
    let exact: Vec<BigRational> = st.edge_level.iter().map(|&k| powers[k as usize].clone()).collect();
    // floating weights are the roundings of the exact ones
    let edges = g
        .edges()
        .iter()
        .zip(&exact)
        .map(|(e, w)| Edge {
            w: w.to_f64().unwrap_or(e.w),
            ..*e
        })
        .collect();
    let g = WeightedGraph::new(g.n_vertices(), edges)?
        .with_labels(g.labels().to_vec())?
        .with_exact_weights(exact)?;
    Ok((g, st))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_diamonds() {
        let (d0, _) = build_diamond(0).unwrap();
        assert_eq!((d0.n_vertices(), d0.n_edges()), (2, 1));
        let (d1, _) = build_diamond(1).unwrap();
        assert_eq!((d1.n_vertices(), d1.n_edges()), (4, 4));
        let (d2, _) = build_diamond(2).unwrap();
        assert_eq!((d2.n_vertices(), d2.n_edges()), (12, 16));
        assert_eq!(d2.hop_distances(BOTTOM)[TOP], 4);
    }

    #[test]
    fn vertex_count_recurrence() {
        // V_n = V_{n-1} + 2 * 4^(n-1), independent of the closed form
        let mut v = 2usize;
        for n in 0..=6u32 {
            if n > 0 {
                v += 2 * 4usize.pow(n - 1);
            }
            let (g, st) = build_diamond(n).unwrap();
            assert_eq!(g.n_vertices(), v);
            assert_eq!(g.n_edges(), 4usize.pow(n));
            for k in 0..=n {
                assert_eq!(st.nodes_at_step(k).len(), 4usize.pow(k));
                assert!(st.subdiamonds[st.nodes_at_step(k)].iter().all(|s| s.step == k));
            }
        }
    }

    #[test]
    fn lineage_tree_shape() {
        let (g, st) = build_diamond(3).unwrap();
        for s in &st.subdiamonds {
            if s.height >= 2 {
                assert_eq!(s.children.len(), 4);
                for &c in &s.children {
                    assert_eq!(st.subdiamonds[c].height * 2, s.height);
                }
            } else {
                assert!(s.children.is_empty());
            }
            // the bottom-to-top distance in D_n equals the height
            assert_eq!(g.hop_distances(s.bottom)[s.top] as u64, s.height);
        }
        assert_eq!(st.root().members.len(), g.n_vertices());
    }

    #[test]
    fn generations_follow_birth() {
        let (_, st) = build_diamond(3).unwrap();
        assert_eq!(st.generation[BOTTOM], None);
        assert_eq!(st.generation[TOP], None);
        for (v, &s) in st.vertex_birth.iter().enumerate().skip(2) {
            assert_eq!(st.generation[v], Some(3 - s + 1));
        }
    }

    #[test]
    fn weighted_w1() {
        let (w1, st) = build_weighted_diamond(1, 0.25).unwrap();
        assert_eq!((w1.n_vertices(), w1.n_edges()), (4, 5));
        assert_eq!(w1.edges()[0].w, 1.0);
        assert!(w1.edges()[1..].iter().all(|e| e.w == 0.75));
        assert_eq!(st.edge_level, vec![0, 1, 1, 1, 1]);
        let (w2, _) = build_weighted_diamond(2, 0.25).unwrap();
        assert_eq!((w2.n_vertices(), w2.n_edges()), (12, 21));
    }

    #[test]
    fn rejects_bad_eps() {
        for eps in [0.0, 0.5, -0.1, 0.7, f64::NAN] {
            assert!(build_weighted_diamond(1, eps).is_err());
        }
        assert!(build_weighted_diamond_exact(1, &parse_rational("1/2").unwrap()).is_err());
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("3/12").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("2").unwrap(), BigRational::from_integer(2.into()));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn exact_weights_are_powers() {
        let eps = parse_rational("1/4").unwrap();
        let (g, st) = build_weighted_diamond_exact(2, &eps).unwrap();
        let exact = g.exact_weights().unwrap();
        for (i, e) in g.edges().iter().enumerate() {
            let k = st.edge_level[i] as i32;
            assert_eq!(exact[i], BigRational::new(3.into(), 4.into()).pow(k));
            assert_eq!(e.w, 0.75f64.powi(k));
        }
    }
}
