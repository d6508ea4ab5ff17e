//! Finite metric spaces induced by weighted graphs, plus exact primitives on
//! them: separated sets, isometric subspaces and geodesic cycles.

pub mod bigon;
pub mod exact;
pub mod separated;

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Write as _;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::WeightedGraph;

pub use bigon::{geodesic_bigon, Bigon};
pub use exact::ExactMetric;
pub use separated::{max_separated_set, SeparatedSet, SeparationMode};

/// Default cap on the number of points of a dense metric.
pub const DEFAULT_MAX_POINTS: usize = 20_000;

/// Relative/absolute tolerance used for every floating comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn slack(&self, a: f64, b: f64) -> f64 {
        (self.rel * a.abs().max(b.abs())).max(self.abs)
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        a == b || (a.is_finite() && b.is_finite() && (a - b).abs() <= self.slack(a, b))
    }

    /// `a <= b` up to tolerance.
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b || self.eq(a, b)
    }

    /// `a < b` by more than the tolerance.
    pub fn lt(&self, a: f64, b: f64) -> bool {
        !self.le(b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Single-source shortest paths. Among equally short routes (up to `tol`) the
/// predecessor with the smallest index wins, so reconstructed paths are
/// reproducible. Unreachable vertices keep distance `inf` and no predecessor.
pub fn shortest_path_tree(g: &WeightedGraph, source: usize, tol: Tolerance) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = g.n_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([Reverse((Key(0.0), source))]);
    while let Some(Reverse((Key(d), x))) = heap.pop() {
        if done[x] || d > dist[x] {
            continue;
        }
        done[x] = true;
        for &(y, ei) in g.neighbors(x) {
            if done[y] {
                continue;
            }
            let nd = d + g.edges()[ei].w;
            if tol.lt(nd, dist[y]) {
                dist[y] = nd;
                pred[y] = Some(x);
                heap.push(Reverse((Key(nd), y)));
            } else if tol.eq(nd, dist[y]) && pred[y].is_some_and(|p| x < p) {
                pred[y] = Some(x);
            }
        }
    }
    (dist, pred)
}

/// Vertex path `source -> target` read off a predecessor array.
pub fn path_from_tree(pred: &[Option<usize>], source: usize, target: usize) -> Option<Vec<usize>> {
    let mut path = vec![target];
    let mut x = target;
    while x != source {
        x = pred[x]?;
        path.push(x);
    }
    path.reverse();
    Some(path)
}

/// Dense symmetric distance matrix over a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<f64>,
    labels: Vec<String>,
}

impl MetricSpace {
    /// Wraps a row-major matrix. Only shape and finiteness are checked here;
    /// use [`MetricSpace::is_metric`] for the axioms.
    pub fn from_matrix(n: usize, dist: Vec<f64>) -> Result<Self> {
        if dist.len() != n * n {
            return Err(Error::SizeMismatch {
                expected: n * n,
                actual: dist.len(),
            });
        }
        if dist.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidParameter("distances must be finite and nonnegative".into()));
        }
        Ok(Self {
            n,
            dist,
            labels: Vec::new(),
        })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = f(i, j);
            }
        }
        Self::from_matrix(n, dist)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if !labels.is_empty() && labels.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> String {
        self.labels.get(i).cloned().unwrap_or_else(|| i.to_string())
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest distance between distinct points, `inf` for fewer than two.
    pub fn min_positive_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.n {
            for j in i + 1..self.n {
                best = best.min(self.d(i, j));
            }
        }
        best
    }

    pub fn eccentricity(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(0.0, f64::max)
    }

    /// Checks zero diagonal, symmetry, positivity off the diagonal and every
    /// triangle inequality, up to `tol`.
    pub fn is_metric(&self, tol: Tolerance) -> bool {
        let n = self.n;
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                return false;
            }
            for j in i + 1..n {
                if !tol.eq(self.d(i, j), self.d(j, i)) || self.d(i, j) <= 0.0 {
                    return false;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = self.d(i, j);
                for k in 0..n {
                    if !tol.le(self.d(i, k), dij + self.d(j, k)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The subspace on `points`, in the given order.
    pub fn restrict(&self, points: &[usize]) -> MetricSpace {
        let m = points.len();
        let mut dist = vec![0.0; m * m];
        for (a, &i) in points.iter().enumerate() {
            for (b, &j) in points.iter().enumerate() {
                dist[a * m + b] = self.d(i, j);
            }
        }
        let labels = if self.labels.is_empty() {
            Vec::new()
        } else {
            points.iter().map(|&i| self.labels[i].clone()).collect()
        };
        MetricSpace { n: m, dist, labels }
    }

    /// True iff `ambient` restricted to `sub` (point `sub[i]` playing the role
    /// of reference point `i`) reproduces `reference`.
    pub fn is_isometric_subspace(sub: &[usize], ambient: &MetricSpace, reference: &MetricSpace, tol: Tolerance) -> Result<bool> {
        if sub.len() != reference.n {
            return Err(Error::SizeMismatch {
                expected: reference.n,
                actual: sub.len(),
            });
        }
        if let Some(&bad) = sub.iter().find(|&&i| i >= ambient.n) {
            return Err(Error::VertexOutOfRange { vertex: bad, n: ambient.n });
        }
        for (a, &i) in sub.iter().enumerate() {
            for (b, &j) in sub.iter().enumerate().skip(a + 1) {
                if !tol.eq(ambient.d(i, j), reference.d(a, b)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// CSV with a header row of labels and one labelled row per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point");
        for j in 0..self.n {
            let _ = write!(out, ",{}", csv_field(&self.label(j)));
        }
        out.push('\n');
        for i in 0..self.n {
            out.push_str(&csv_field(&self.label(i)));
            for j in 0..self.n {
                let _ = write!(out, ",{}", self.d(i, j));
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn shortest_path_metric(g: &WeightedGraph) -> Result<MetricSpace> {
    shortest_path_metric_capped(g, DEFAULT_MAX_POINTS)
}

/// All-pairs shortest-path metric of a connected graph, one Dijkstra run per
/// source.
pub fn shortest_path_metric_capped(g: &WeightedGraph, cap: usize) -> Result<MetricSpace> {
    let n = g.n_vertices();
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    let tol = Tolerance::default();
    let run = |s: usize| shortest_path_tree(g, s, tol).0;
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..n).map(run).collect();
    let mut dist = Vec::with_capacity(n * n);
    for (i, row) in rows.into_iter().enumerate() {
        if let Some(j) = row.iter().position(|d| d.is_infinite()) {
            return Err(Error::Disconnected(i.min(j), i.max(j)));
        }
        dist.extend(row);
    }
    // symmetrize: floating sums along the two directions may differ in the last ulp
    for i in 0..n {
        for j in i + 1..n {
            let m = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = m;
            dist[j * n + i] = m;
        }
    }
    MetricSpace::from_matrix(n, dist)?.with_labels(g.labels().to_vec())
}

/// Cartesian product with the sum of coordinate distances. Points are
/// enumerated with the last factor varying fastest.
pub fn l1_product(spaces: &[MetricSpace], cap: usize) -> Result<MetricSpace> {
    if spaces.is_empty() {
        return Err(Error::InvalidParameter("l1 product of an empty list".into()));
    }
    if spaces.iter().any(|s| s.n == 0) {
        return Err(Error::InvalidParameter("l1 product factor is empty".into()));
    }
    let mut size = 1usize;
    for s in spaces {
        size = size
            .checked_mul(s.n)
            .filter(|&x| x <= cap)
            .ok_or(Error::TooLarge { size: usize::MAX, cap })?;
    }
    let coords = |mut p: usize| {
        let mut c = vec![0; spaces.len()];
        for (k, s) in spaces.iter().enumerate().rev() {
            c[k] = p % s.n;
            p /= s.n;
        }
        c
    };
    let all: Vec<Vec<usize>> = (0..size).map(coords).collect();
    let m = MetricSpace::from_fn(size, |a, b| spaces.iter().enumerate().map(|(k, s)| s.d(all[a][k], all[b][k])).sum())?;
    let labels = all
        .iter()
        .map(|c| {
            let parts: Vec<String> = c.iter().enumerate().map(|(k, &i)| spaces[k].label(i)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    m.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_binary_tree, build_cycle, build_diamond, build_path, build_weighted_diamond};

    #[test]
    fn diamond_one_is_a_square() {
        let (g, _) = build_diamond(1).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        for e in g.edges() {
            assert_eq!(m.d(e.u, e.v), 1.0);
        }
        assert_eq!(m.d(0, 1), 2.0);
        assert_eq!(m.d(2, 3), 2.0);
    }

    #[test]
    fn weighted_w1_distances() {
        let (g, _) = build_weighted_diamond(1, 0.25).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        assert_eq!(m.d(0, 1), 1.0);
        assert_eq!(m.d(2, 3), 1.5);
    }

    #[test]
    fn path_and_diameters() {
        let m = shortest_path_metric(&build_path(3).unwrap()).unwrap();
        assert_eq!(m.d(0, 3), 3.0);
        for n in 0..=6 {
            let d = shortest_path_metric(&build_diamond(n).unwrap().0).unwrap();
            assert_eq!(d.diameter(), f64::from(1 << n));
            let t = shortest_path_metric(&build_binary_tree(n).unwrap()).unwrap();
            assert_eq!(t.diameter(), f64::from(2 * n));
        }
    }

    #[test]
    fn disconnected_graph_reports_pair() {
        let g = WeightedGraph::unit(3, [(0, 1)]).unwrap();
        assert_eq!(shortest_path_metric(&g), Err(Error::Disconnected(0, 2)));
    }

    #[test]
    fn cap_is_enforced() {
        let g = build_path(10).unwrap();
        assert!(matches!(shortest_path_metric_capped(&g, 5), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn violated_triangle() {
        let m = MetricSpace::from_matrix(3, vec![0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0]).unwrap();
        assert!(!m.is_metric(Tolerance::default()));
        let asym = MetricSpace::from_matrix(2, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        assert!(!asym.is_metric(Tolerance::default()));
        let zero = MetricSpace::from_matrix(2, vec![0.0; 4]).unwrap();
        assert!(!zero.is_metric(Tolerance::default()));
    }

    #[test]
    fn isometric_subspaces() {
        let c4 = shortest_path_metric(&build_cycle(4).unwrap()).unwrap();
        assert!(MetricSpace::is_isometric_subspace(&[0, 1, 2, 3], &c4, &c4, Tolerance::default()).unwrap());
        assert!(MetricSpace::is_isometric_subspace(&[0, 1], &c4, &c4, Tolerance::default()).is_err());
        // four evenly spaced points of C_16 sit 8 apart across; D_2 has diameter 4
        let (d2, _) = build_diamond(2).unwrap();
        let m = shortest_path_metric(&d2).unwrap();
        let c16 = shortest_path_metric(&build_cycle(16).unwrap()).unwrap().restrict(&[0, 4, 8, 12]);
        let idx = |l: &str| d2.vertex_by_label(l).unwrap();
        let sub = [idx("bottom"), idx("ra"), idx("top"), idx("rb")];
        assert!(!MetricSpace::is_isometric_subspace(&sub, &m, &c16, Tolerance::default()).unwrap());
    }

    #[test]
    fn l1_products() {
        let t1 = shortest_path_metric(&build_binary_tree(1).unwrap()).unwrap();
        let same = l1_product(std::slice::from_ref(&t1), 100).unwrap();
        assert_eq!(same.n_points(), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(same.d(i, j), t1.d(i, j));
            }
        }
        let sq = l1_product(&[t1.clone(), t1.clone()], 100).unwrap();
        // ((0),(1)) vs ((1),(0)): tree vertices 1 = "0", 2 = "1"
        assert_eq!(sq.d(3 + 2, 2 * 3 + 1), 4.0);
        assert!(sq.is_metric(Tolerance::default()));
        let two = MetricSpace::from_matrix(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let unit_square = l1_product(&[two.clone(), two], 100).unwrap();
        let want = [
            [0.0, 1.0, 1.0, 2.0],
            [1.0, 0.0, 2.0, 1.0],
            [1.0, 2.0, 0.0, 1.0],
            [2.0, 1.0, 1.0, 0.0],
        ];
        for (i, row) in want.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                assert_eq!(unit_square.d(i, j), w);
            }
        }
        assert!(l1_product(&[], 100).is_err());
        assert!(matches!(l1_product(&[t1.clone(), t1.clone(), t1], 10), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn tie_break_prefers_small_predecessor() {
        let (g, _) = build_diamond(1).unwrap();
        let (_, pred) = shortest_path_tree(&g, 0, Tolerance::default());
        // bottom -> top via a (vertex 2) or b (vertex 3)
        assert_eq!(pred[1], Some(2));
        assert_eq!(path_from_tree(&pred, 0, 1), Some(vec![0, 2, 1]));
    }
}
