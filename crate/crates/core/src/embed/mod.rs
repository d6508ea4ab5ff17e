//! Embeddings of finite metric spaces into normed coordinate spaces, and the
//! distortion bookkeeping around them.

pub mod diamond;
pub mod glue;
pub mod line;
pub mod mindist;

use std::fmt::Write as _;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{csv_field, MetricSpace};

pub use diamond::{embed_weighted_diamond, m_of_eps, weighted_diamond_bound};
pub use glue::{block_embedding, glue_embed};
pub use line::dinfinity_phi;
pub use mindist::{min_distortion, MinDistortion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::Linf => diffs.fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            _ => Err(Error::InvalidParameter(format!("unknown norm {s:?}"))),
        }
    }
}

/// Points of a finite space mapped to coordinate vectors of a common
/// dimension, measured in `norm`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    norm: Norm,
    dim: usize,
    coords: Vec<f64>,
    labels: Vec<String>,
}

impl Embedding {
    pub fn new(norm: Norm, dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("embedding dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::SizeMismatch {
                expected: coords.len().div_ceil(dim) * dim,
                actual: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("coordinates must be finite".into()));
        }
        Ok(Self {
            norm,
            dim,
            coords,
            labels: Vec::new(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if !labels.is_empty() && labels.len() != self.n_points() {
            return Err(Error::SizeMismatch {
                expected: self.n_points(),
                actual: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    /// The same coordinates measured in another norm.
    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn host_distance(&self, i: usize, j: usize) -> f64 {
        self.norm.distance(self.point(i), self.point(j))
    }

    /// Metric induced on the images (may have zero off-diagonal entries).
    pub fn host_metric(&self) -> Result<MetricSpace> {
        MetricSpace::from_fn(self.n_points(), |i, j| self.host_distance(i, j))
    }

    /// CSV rows `point_label,x_0,...,x_{d-1}`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point_label");
        for k in 0..self.dim {
            let _ = write!(out, ",x_{k}");
        }
        out.push('\n');
        for i in 0..self.n_points() {
            let label = self.labels.get(i).cloned().unwrap_or_else(|| i.to_string());
            out.push_str(&csv_field(&label));
            for c in self.point(i) {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

/// Lipschitz constants of a map and of its inverse, with the first pair (in
/// lexicographic order) attaining each maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionReport {
    pub lip: f64,
    pub lip_inv: f64,
    pub distortion: f64,
    pub witness_expand: Option<(usize, usize)>,
    pub witness_contract: Option<(usize, usize)>,
}

#[derive(Clone, Copy)]
struct RowMax {
    expand: f64,
    expand_at: Option<(usize, usize)>,
    contract: f64,
    contract_at: Option<(usize, usize)>,
}

impl RowMax {
    const EMPTY: RowMax = RowMax {
        expand: 0.0,
        expand_at: None,
        contract: 0.0,
        contract_at: None,
    };

    /// Keeps the earlier witness on ties; rows are merged in order.
    fn merge(mut self, other: RowMax) -> RowMax {
        if other.expand > self.expand {
            self.expand = other.expand;
            self.expand_at = other.expand_at;
        }
        if other.contract > self.contract {
            self.contract = other.contract;
            self.contract_at = other.contract_at;
        }
        self
    }
}

/// Distortion of the map `i -> i` between two point sets, given the source
/// distance and image distance of every pair. Coincident images of distinct
/// points make `lip_inv` infinite.
pub fn pair_distortion(
    n: usize,
    source: impl Fn(usize, usize) -> f64 + Sync,
    image: impl Fn(usize, usize) -> f64 + Sync,
) -> DistortionReport {
    let row = |i: usize| {
        let mut acc = RowMax::EMPTY;
        for j in i + 1..n {
            let s = source(i, j);
            let h = image(i, j);
            let expand = h / s;
            let contract = if h == 0.0 { f64::INFINITY } else { s / h };
            if expand > acc.expand || acc.expand_at.is_none() {
                acc.expand = expand;
                acc.expand_at = Some((i, j));
            }
            if contract > acc.contract || acc.contract_at.is_none() {
                acc.contract = contract;
                acc.contract_at = Some((i, j));
            }
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<RowMax> = (0..n).into_par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<RowMax> = (0..n).map(row).collect();
    let acc = rows.into_iter().fold(RowMax::EMPTY, |a, r| {
        if a.expand_at.is_none() {
            r
        } else if r.expand_at.is_none() {
            a
        } else {
            a.merge(r)
        }
    });
    let distortion = if acc.expand_at.is_none() { 1.0 } else { acc.expand * acc.contract };
    DistortionReport {
        lip: acc.expand,
        lip_inv: acc.contract,
        distortion,
        witness_expand: acc.expand_at,
        witness_contract: acc.contract_at,
    }
}

/// Distortion of an embedding of `m`, by an exact scan of all pairs. Spaces
/// with fewer than two points report distortion 1 and no witnesses.
pub fn distortion(e: &Embedding, m: &MetricSpace) -> Result<DistortionReport> {
    if e.n_points() != m.n_points() {
        return Err(Error::SizeMismatch {
            expected: m.n_points(),
            actual: e.n_points(),
        });
    }
    Ok(pair_distortion(m.n_points(), |i, j| m.d(i, j), |i, j| e.host_distance(i, j)))
}

/// Distortion of a vertex map `f` from `source` into `target`.
pub fn map_distortion(f: &[usize], source: &MetricSpace, target: &MetricSpace) -> Result<DistortionReport> {
    if f.len() != source.n_points() {
        return Err(Error::SizeMismatch {
            expected: source.n_points(),
            actual: f.len(),
        });
    }
    if let Some(&bad) = f.iter().find(|&&x| x >= target.n_points()) {
        return Err(Error::VertexOutOfRange {
            vertex: bad,
            n: target.n_points(),
        });
    }
    Ok(pair_distortion(f.len(), |i, j| source.d(i, j), |i, j| target.d(f[i], f[j])))
}

/// Additive slack of a map against fixed multiplicative constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiIsometryFit {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

/// Smallest `b >= 0` with `a1 d(u,v) - b <= d(fu,fv) <= a2 d(u,v) + b` for all
/// pairs.
pub fn fit_quasi_isometry(f: &[usize], source: &MetricSpace, target: &MetricSpace, a1: f64, a2: f64) -> Result<QuasiIsometryFit> {
    if !(a1 > 0.0 && a2 >= a1 && a2.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < a1 <= a2, got a1={a1}, a2={a2}")));
    }
    if f.len() != source.n_points() {
        return Err(Error::SizeMismatch {
            expected: source.n_points(),
            actual: f.len(),
        });
    }
    if let Some(&bad) = f.iter().find(|&&x| x >= target.n_points()) {
        return Err(Error::VertexOutOfRange {
            vertex: bad,
            n: target.n_points(),
        });
    }
    let mut b: f64 = 0.0;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let dx = source.d(i, j);
            let dy = target.d(f[i], f[j]);
            b = b.max(a1 * dx - dy).max(dy - a2 * dx);
        }
    }
    Ok(QuasiIsometryFit { a1, a2, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_path;
    use crate::metric::shortest_path_metric;

    #[test]
    fn norms() {
        let (a, b) = ([0.0, 0.0], [3.0, -4.0]);
        assert_eq!(Norm::L1.distance(&a, &b), 7.0);
        assert_eq!(Norm::L2.distance(&a, &b), 5.0);
        assert_eq!(Norm::Linf.distance(&a, &b), 4.0);
        assert_eq!("linf".parse::<Norm>().unwrap(), Norm::Linf);
        assert!("l3".parse::<Norm>().is_err());
    }

    #[test]
    fn path_on_the_line_is_isometric() {
        let m = shortest_path_metric(&build_path(5).unwrap()).unwrap();
        let e = Embedding::new(Norm::L2, 1, (0..6).map(f64::from).collect()).unwrap();
        let r = distortion(&e, &m).unwrap();
        assert_eq!((r.lip, r.lip_inv, r.distortion), (1.0, 1.0, 1.0));
        assert_eq!(r.witness_expand, Some((0, 1)));
        assert_eq!(r.witness_contract, Some((0, 1)));
    }

    #[test]
    fn collapsed_points() {
        let m = shortest_path_metric(&build_path(2).unwrap()).unwrap();
        let e = Embedding::new(Norm::L1, 1, vec![0.0, 0.0, 1.0]).unwrap();
        let r = distortion(&e, &m).unwrap();
        assert!(r.lip_inv.is_infinite());
        assert_eq!(r.witness_contract, Some((0, 1)));
        let single = Embedding::new(Norm::L2, 1, vec![0.0]).unwrap();
        let m1 = MetricSpace::from_matrix(1, vec![0.0]).unwrap();
        assert_eq!(distortion(&single, &m1).unwrap().distortion, 1.0);
        assert!(distortion(&single, &m).is_err());
    }

    #[test]
    fn quasi_isometry_slack() {
        let m = shortest_path_metric(&build_path(4).unwrap()).unwrap();
        let id: Vec<usize> = (0..5).collect();
        assert_eq!(fit_quasi_isometry(&id, &m, &m, 1.0, 1.0).unwrap().b, 0.0);
        let constant = vec![0; 5];
        assert_eq!(fit_quasi_isometry(&constant, &m, &m, 1.0, 1.0).unwrap().b, m.diameter());
        assert!(fit_quasi_isometry(&id, &m, &m, 2.0, 1.0).is_err());
    }
}
