//! Euclidean embedding of weighted diamonds.
//!
//! Bottom and top go to `0` and `e_0`. When the lineage edge `uv` created at
//! step `k - 1` is split into `a` and `b`, they are placed at
//! `(F(u) + F(v)) / 2 +- omega_k e_uv` with
//! `omega_k = sqrt(eps + eps^2) (1/2 + eps)^(k-1)` and a fresh coordinate
//! `e_uv` per split edge; `a` takes the plus sign. That choice of `omega_k`
//! makes every edge of `W_n` exactly as long as its weight.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{build_weighted_diamond, DiamondStructure, WeightedGraph};
use crate::metric::exact::exact_shortest_path_tree;
use crate::metric::{path_from_tree, shortest_path_tree, Tolerance};

use super::{Embedding, Norm};

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    Ok(())
}

/// `1 + (4^level - 1) / 3`: `e_0` plus one coordinate per split edge.
pub fn embedding_dim(level: u32) -> usize {
    1 + ((1usize << (2 * level)) - 1) / 3
}

pub fn omega(eps: f64, step: u32) -> f64 {
    (eps + eps * eps).sqrt() * (0.5 + eps).powi(step as i32 - 1)
}

/// Embedding of the weighted diamond described by `st` (which must come from
/// [`build_weighted_diamond`]).
pub fn embed_structure(st: &DiamondStructure, eps: f64) -> Result<Embedding> {
    check_eps(eps)?;
    let dim = embedding_dim(st.level);
    let n = st.n_vertices();
    let mut coords = vec![0.0; n * dim];
    coords[dim] = 1.0; // top = e_0
    for (id, node) in st.subdiamonds.iter().enumerate() {
        let Some((a, b)) = node.split else { continue };
        let w = omega(eps, node.step + 1);
        let axis = 1 + id;
        for c in 0..dim {
            let mid = 0.5 * (coords[node.bottom * dim + c] + coords[node.top * dim + c]);
            coords[a * dim + c] = mid;
            coords[b * dim + c] = mid;
        }
        coords[a * dim + axis] += w;
        coords[b * dim + axis] -= w;
    }
    let mut labels = vec![String::new(); n];
    labels[0] = "bottom".into();
    labels[1] = "top".into();
    for node in &st.subdiamonds {
        if let Some((a, b)) = node.split {
            labels[a] = format!("{}a", node.path);
            labels[b] = format!("{}b", node.path);
        }
    }
    Embedding::new(Norm::L2, dim, coords)?.with_labels(labels)
}

/// Builds `W_level` and its embedding.
pub fn embed_weighted_diamond(level: u32, eps: f64) -> Result<(WeightedGraph, DiamondStructure, Embedding)> {
    let (g, st) = build_weighted_diamond(level, eps)?;
    let e = embed_structure(&st, eps)?.with_labels(g.labels().to_vec())?;
    Ok((g, st, e))
}

/// Least `m` with `q + q^2 + ... + q^m >= 1 + q^m`, `q = 1/2 + eps`: the
/// number of consecutive halving steps after which a route through the
/// diagonal is shorter.
pub fn m_of_eps(eps: f64) -> Result<u32> {
    check_eps(eps)?;
    let q = 0.5 + eps;
    let mut sum = 0.0;
    let mut power = 1.0;
    for m in 1..=100_000u32 {
        power *= q;
        sum += power;
        if sum >= 1.0 + power {
            return Ok(m);
        }
    }
    Err(Error::InvalidParameter(format!("no m found for eps = {eps}")))
}

/// Upper bound on `lip(F_n^-1)` valid for every level:
/// `2^(m+1) (1/2 + eps) / ((1/2 - eps) sqrt(eps + eps^2))` with `m = m_of_eps`.
pub fn weighted_diamond_bound(eps: f64) -> Result<f64> {
    let m = m_of_eps(eps)?;
    Ok(2f64.powi(m as i32 + 1) / ((0.5 - eps) * (eps + eps * eps).sqrt()) * (0.5 + eps))
}

/// `lip(F_1^-1)`, attained by the two split vertices of `W_1`.
pub fn level_one_distortion(eps: f64) -> f64 {
    (1.0 + 2.0 * eps) / (2.0 * (eps + eps * eps).sqrt())
}

/// Edges whose image length differs from their weight by more than `tol`.
pub fn edge_isometry_violations(g: &WeightedGraph, e: &Embedding, tol: Tolerance) -> Vec<(usize, f64, f64)> {
    g.edges()
        .iter()
        .enumerate()
        .filter_map(|(i, edge)| {
            let image = e.host_distance(edge.u, edge.v);
            (!tol.eq(image, edge.w)).then_some((i, image, edge.w))
        })
        .collect()
}

/// Coordinates of the embedding with exact rational coefficients: the
/// `e_0` entry is stored as is, every other entry as a multiple of
/// `sqrt(eps + eps^2)`, so squared lengths are rational.
#[derive(Debug, Clone)]
pub struct ExactCoords {
    pub eps: BigRational,
    dim: usize,
    coef: Vec<BigRational>,
}

impl ExactCoords {
    pub fn new(st: &DiamondStructure, eps: &BigRational) -> Result<Self> {
        let half = BigRational::new(1.into(), 2.into());
        if !(*eps > BigRational::zero() && *eps < half) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
        }
        let q = &half + eps;
        let dim = embedding_dim(st.level);
        let n = st.n_vertices();
        let mut coef = vec![BigRational::zero(); n * dim];
        coef[dim] = BigRational::one();
        for (id, node) in st.subdiamonds.iter().enumerate() {
            let Some((a, b)) = node.split else { continue };
            let w = q.pow(node.step as i32);
            for c in 0..dim {
                let mid = (&coef[node.bottom * dim + c] + &coef[node.top * dim + c]) * &half;
                coef[a * dim + c] = mid.clone();
                coef[b * dim + c] = mid;
            }
            coef[a * dim + 1 + id] += &w;
            coef[b * dim + 1 + id] -= &w;
        }
        Ok(Self {
            eps: eps.clone(),
            dim,
            coef,
        })
    }

    pub fn squared_distance(&self, u: usize, v: usize) -> BigRational {
        let scale = &self.eps + &self.eps * &self.eps;
        let mut head = BigRational::zero();
        let mut tail = BigRational::zero();
        for c in 0..self.dim {
            let d = &self.coef[u * self.dim + c] - &self.coef[v * self.dim + c];
            if d.is_zero() {
                continue;
            }
            if c == 0 {
                head += &d * &d;
            } else {
                tail += &d * &d;
            }
        }
        head + tail * scale
    }

    /// Edges whose squared image length is not exactly the squared weight.
    pub fn edge_violations(&self, g: &WeightedGraph) -> Result<Vec<usize>> {
        let w = g
            .exact_weights()
            .ok_or_else(|| Error::InvalidParameter("graph carries no exact weights".into()))?;
        Ok(g.edges()
            .iter()
            .enumerate()
            .filter(|(i, e)| self.squared_distance(e.u, e.v) != &w[*i] * &w[*i])
            .map(|(i, _)| i)
            .collect())
    }
}

/// Counts of edges per weight class along the checked shortest paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightClassReport {
    pub pairs: usize,
    pub paths: u64,
    /// Largest number of edges of weight class `k` seen on a single path.
    pub max_per_class: Vec<usize>,
    /// `(source, target, path)` for paths using the diagonal of the whole
    /// diamond twice or another class more than twice.
    pub violations: Vec<(usize, usize, Vec<usize>)>,
}

fn class_counts(g: &WeightedGraph, st: &DiamondStructure, path: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; st.level as usize + 1];
    for w in path.windows(2) {
        let ei = g
            .neighbors(w[0])
            .iter()
            .filter(|&&(y, _)| y == w[1])
            .map(|&(_, ei)| ei)
            .min_by(|&a, &b| g.edges()[a].w.total_cmp(&g.edges()[b].w))
            .expect("consecutive path vertices are adjacent");
        counts[st.edge_level[ei] as usize] += 1;
    }
    counts
}

fn violates(counts: &[usize]) -> bool {
    counts.first().is_some_and(|&c| c > 1) || counts.iter().any(|&c| c > 2)
}

/// Checks that shortest paths of `W_n` use each weight class at most twice
/// and the top-level diagonal at most once.
///
/// With `all_paths = None` one canonical path per pair is checked (smallest
/// predecessor on ties, exact when the graph carries exact weights). With
/// `Some(budget)` every shortest path is enumerated, failing once more than
/// `budget` paths have been visited.
pub fn check_weight_classes(g: &WeightedGraph, st: &DiamondStructure, all_paths: Option<u64>) -> Result<WeightClassReport> {
    let n = g.n_vertices();
    let tol = Tolerance::default();
    let mut report = WeightClassReport {
        pairs: 0,
        paths: 0,
        max_per_class: vec![0; st.level as usize + 1],
        violations: Vec::new(),
    };
    let record = |report: &mut WeightClassReport, s: usize, t: usize, path: Vec<usize>| {
        let counts = class_counts(g, st, &path);
        for (m, c) in report.max_per_class.iter_mut().zip(&counts) {
            *m = (*m).max(*c);
        }
        report.paths += 1;
        if violates(&counts) {
            report.violations.push((s, t, path));
        }
    };
    for s in 0..n {
        match all_paths {
            None => {
                let pred = if g.exact_weights().is_some() {
                    exact_shortest_path_tree(g, s)?.1
                } else {
                    shortest_path_tree(g, s, tol).1
                };
                for t in s + 1..n {
                    let path = path_from_tree(&pred, s, t).ok_or(Error::Disconnected(s, t))?;
                    report.pairs += 1;
                    record(&mut report, s, t, path);
                }
            }
            Some(budget) => {
                let (dist, _) = shortest_path_tree(g, s, tol);
                for t in s + 1..n {
                    if dist[t].is_infinite() {
                        return Err(Error::Disconnected(s, t));
                    }
                    report.pairs += 1;
                    // walk back from t along tight edges
                    let mut stack = vec![vec![t]];
                    while let Some(partial) = stack.pop() {
                        let x = *partial.last().expect("nonempty");
                        if x == s {
                            if report.paths >= budget {
                                return Err(Error::BudgetExceeded(budget));
                            }
                            let mut path = partial;
                            path.reverse();
                            record(&mut report, s, t, path);
                            continue;
                        }
                        for &(y, ei) in g.neighbors(x).iter().rev() {
                            if tol.eq(dist[y] + g.edges()[ei].w, dist[x]) && dist[y] < dist[x] {
                                let mut next = partial.clone();
                                next.push(y);
                                stack.push(next);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}
