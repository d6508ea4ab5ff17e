//! Shortest-path metrics over exact rational weights.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graphs::WeightedGraph;

use super::MetricSpace;

fn exact_weights(g: &WeightedGraph) -> Result<&[BigRational]> {
    g.exact_weights()
        .ok_or_else(|| Error::InvalidParameter("graph carries no exact weights".into()))
}

/// Distances (None when unreachable) and predecessors from one source.
pub type ExactTree = (Vec<Option<BigRational>>, Vec<Option<usize>>);

/// Exact single-source shortest paths; ties go to the smallest predecessor.
pub fn exact_shortest_path_tree(g: &WeightedGraph, source: usize) -> Result<ExactTree> {
    let w = exact_weights(g)?;
    let n = g.n_vertices();
    let mut dist: Vec<Option<BigRational>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    dist[source] = Some(BigRational::zero());
    let mut heap = BinaryHeap::from([Reverse((BigRational::zero(), source))]);
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, ei) in g.neighbors(x) {
            if done[y] {
                continue;
            }
            let nd = &d + &w[ei];
            match &dist[y] {
                Some(cur) if nd > *cur => {}
                Some(cur) if nd == *cur => {
                    if pred[y].is_some_and(|p| x < p) {
                        pred[y] = Some(x);
                    }
                }
                _ => {
                    dist[y] = Some(nd.clone());
                    pred[y] = Some(x);
                    heap.push(Reverse((nd, y)));
                }
            }
        }
    }
    Ok((dist, pred))
}

/// Dense matrix of exact rational distances.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMetric {
    n: usize,
    dist: Vec<BigRational>,
}

impl ExactMetric {
    pub fn from_graph(g: &WeightedGraph) -> Result<Self> {
        let n = g.n_vertices();
        let mut dist = Vec::with_capacity(n * n);
        for s in 0..n {
            let (row, _) = exact_shortest_path_tree(g, s)?;
            for (t, d) in row.into_iter().enumerate() {
                dist.push(d.ok_or(Error::Disconnected(s.min(t), s.max(t)))?);
            }
        }
        Ok(Self { n, dist })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn d(&self, i: usize, j: usize) -> &BigRational {
        &self.dist[i * self.n + j]
    }

    /// Metric axioms without tolerance.
    pub fn is_metric(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            if !self.d(i, i).is_zero() {
                return false;
            }
            for j in i + 1..n {
                if self.d(i, j) != self.d(j, i) || self.d(i, j) <= &BigRational::zero() {
                    return false;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if *self.d(i, k) > self.d(i, j) + self.d(j, k) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_f64(&self) -> Result<MetricSpace> {
        let dist = self.dist.iter().map(|d| d.to_f64().unwrap_or(f64::NAN)).collect();
        MetricSpace::from_matrix(self.n, dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_weighted_diamond_exact;
    use crate::graphs::diamond::parse_rational;
    use crate::metric::{shortest_path_metric, Tolerance};

    #[test]
    fn exact_w1() {
        let (g, _) = build_weighted_diamond_exact(1, &parse_rational("1/4").unwrap()).unwrap();
        let m = ExactMetric::from_graph(&g).unwrap();
        assert_eq!(*m.d(0, 1), BigRational::from_integer(1.into()));
        assert_eq!(*m.d(2, 3), parse_rational("3/2").unwrap());
        assert!(m.is_metric());
    }

    #[test]
    fn exact_agrees_with_float() {
        let tol = Tolerance::default();
        for n in 0..=3 {
            let (g, _) = build_weighted_diamond_exact(n, &parse_rational("1/10").unwrap()).unwrap();
            let exact = ExactMetric::from_graph(&g).unwrap();
            assert!(exact.is_metric());
            let float = shortest_path_metric(&g).unwrap();
            let conv = exact.to_f64().unwrap();
            for i in 0..g.n_vertices() {
                for j in 0..g.n_vertices() {
                    assert!(tol.eq(float.d(i, j), conv.d(i, j)));
                }
            }
        }
    }

    #[test]
    fn needs_exact_weights() {
        let g = WeightedGraph::unit(2, [(0, 1)]).unwrap();
        assert!(ExactMetric::from_graph(&g).is_err());
    }
}
