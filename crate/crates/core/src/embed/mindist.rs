//! Exact minimum distortion of injective vertex maps between finite metrics.
//!
//! The distortion of a map is `(max expansion) * (max contraction)` over all
//! pairs. Both factors only grow as more vertices are placed, so the product
//! over a partial map bounds every completion from below.
//!
//! The search runs in two phases. The first is a branch-and-bound for the
//! optimal value: source vertices are placed in decreasing eccentricity,
//! images are tried in increasing index and a greedy map seeds the incumbent.
//! The second walks maps in lexicographic order and stops at the first one
//! within tolerance of that optimum, which makes the returned witness
//! independent of the search heuristics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Tolerance};

use super::map_distortion;

pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinDistortion {
    pub value: f64,
    /// `map[i]` is the target point of source point `i`.
    pub map: Vec<usize>,
    /// True when the search finished within its budget.
    pub certified: bool,
    pub nodes: u64,
}

struct Frame<'a> {
    source: &'a MetricSpace,
    target: &'a MetricSpace,
    order: Vec<usize>,
    image: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl Frame<'_> {
    /// Expansion and contraction after placing `order[depth]` at `t`.
    fn extend(&self, depth: usize, t: usize, expand: f64, contract: f64) -> (f64, f64) {
        let v = self.order[depth];
        let (mut e, mut c) = (expand, contract);
        for &u in &self.order[..depth] {
            let s = self.source.d(u, v);
            let h = self.target.d(self.image[u], t);
            e = e.max(h / s);
            c = c.max(if h == 0.0 { f64::INFINITY } else { s / h });
        }
        (e, c)
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    /// Phase one: lowers `best` to the optimum, pruning ties.
    fn optimize(&mut self, depth: usize, expand: f64, contract: f64, best: &mut (f64, Vec<usize>)) -> Result<()> {
        if depth == self.order.len() {
            if expand * contract < best.0 {
                best.0 = expand * contract;
                best.1 = self.image.clone();
            }
            return Ok(());
        }
        let v = self.order[depth];
        for t in 0..self.target.n_points() {
            if self.used[t] {
                continue;
            }
            self.tick()?;
            let (e, c) = self.extend(depth, t, expand, contract);
            if e * c >= best.0 {
                continue;
            }
            self.used[t] = true;
            self.image[v] = t;
            self.optimize(depth + 1, e, c, best)?;
            self.used[t] = false;
        }
        Ok(())
    }

    /// Phase two: first map in lexicographic order with distortion within
    /// `limit`. Requires `order` to be the identity.
    fn first_within(&mut self, depth: usize, expand: f64, contract: f64, limit: f64) -> Result<bool> {
        if depth == self.order.len() {
            return Ok(true);
        }
        let v = self.order[depth];
        for t in 0..self.target.n_points() {
            if self.used[t] {
                continue;
            }
            self.tick()?;
            let (e, c) = self.extend(depth, t, expand, contract);
            if e * c > limit {
                continue;
            }
            self.used[t] = true;
            self.image[v] = t;
            let found = self.first_within(depth + 1, e, c, limit)?;
            self.used[t] = false;
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Greedy seed: each source vertex (in search order) takes the free target
/// vertex that keeps the running distortion smallest.
fn greedy_map(frame: &Frame) -> Vec<usize> {
    let mut image = vec![usize::MAX; frame.source.n_points()];
    let mut used = vec![false; frame.target.n_points()];
    let (mut expand, mut contract) = (0.0f64, 0.0f64);
    for &v in &frame.order {
        let mut pick = None;
        for t in (0..frame.target.n_points()).filter(|&t| !used[t]) {
            let (mut e, mut c) = (expand, contract);
            for &u in frame.order.iter().take_while(|&&u| image[u] != usize::MAX) {
                let s = frame.source.d(u, v);
                let h = frame.target.d(image[u], t);
                e = e.max(h / s);
                c = c.max(s / h);
            }
            if pick.is_none_or(|(_, pe, pc): (usize, f64, f64)| e * c < pe * pc) {
                pick = Some((t, e, c));
            }
        }
        let (t, e, c) = pick.expect("target has enough points");
        image[v] = t;
        used[t] = true;
        expand = e;
        contract = c;
    }
    image
}

/// Exact minimum distortion over injective maps `source -> target`.
///
/// The returned map is the lexicographically smallest map whose distortion
/// is within the default relative tolerance of the optimum, and `value` is
/// its distortion. If the budget runs out the best map found so far is
/// returned with `certified = false`.
pub fn min_distortion(source: &MetricSpace, target: &MetricSpace, budget: u64) -> Result<MinDistortion> {
    let n = source.n_points();
    if n > target.n_points() {
        return Err(Error::InvalidParameter(format!(
            "source has {n} points but target only {}",
            target.n_points()
        )));
    }
    if n < 2 {
        return Ok(MinDistortion {
            value: 1.0,
            map: vec![0; n],
            certified: true,
            nodes: 0,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| source.eccentricity(b).total_cmp(&source.eccentricity(a)).then(a.cmp(&b)));
    let mut frame = Frame {
        source,
        target,
        order,
        image: vec![usize::MAX; n],
        used: vec![false; target.n_points()],
        nodes: 0,
        budget,
    };
    let seed = greedy_map(&frame);
    let seed_value = map_distortion(&seed, source, target)?.distortion;
    let mut best = (seed_value, seed);
    if let Err(Error::BudgetExceeded(_)) = frame.optimize(0, 0.0, 0.0, &mut best) {
        return Ok(MinDistortion {
            value: map_distortion(&best.1, source, target)?.distortion,
            map: best.1,
            certified: false,
            nodes: frame.nodes,
        });
    }
    let tol = Tolerance::default();
    let limit = best.0 + tol.slack(best.0, best.0);
    frame.order = (0..n).collect();
    frame.image = vec![usize::MAX; n];
    frame.used = vec![false; target.n_points()];
    let map = match frame.first_within(0, 0.0, 0.0, limit) {
        Ok(true) => frame.image.clone(),
        Ok(false) => unreachable!("the phase-one optimum lies within the limit"),
        Err(_) => {
            return Ok(MinDistortion {
                value: map_distortion(&best.1, source, target)?.distortion,
                map: best.1,
                certified: false,
                nodes: frame.nodes,
            })
        }
    };
    Ok(MinDistortion {
        value: map_distortion(&map, source, target)?.distortion,
        map,
        certified: true,
        nodes: frame.nodes,
    })
}
