//! Maximum `delta`-separated sets.
//!
//! Two points conflict when they are closer than `delta`. A separated set is
//! an independent set of the conflict graph, i.e. a clique of the
//! compatibility graph, and the exact search is a branch-and-bound max-clique
//! over bitsets. Its bound colours the candidates greedily; each colour class
//! is a clique of the conflict graph, so it holds at most one chosen point.

use serde::Serialize;

use crate::error::{Error, Result};

use super::{MetricSpace, Tolerance};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationMode {
    /// Maximum cardinality, certified.
    Exact { node_budget: u64 },
    /// First-fit in index order: maximal, not necessarily maximum.
    Greedy,
}

impl SeparationMode {
    pub fn exact() -> Self {
        SeparationMode::Exact {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedSet {
    pub delta: f64,
    pub members: Vec<usize>,
    pub certified_max: bool,
    /// Search nodes expanded (0 for greedy).
    pub nodes: u64,
}

impl SeparatedSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_valid(&self, m: &MetricSpace, tol: Tolerance) -> bool {
        self.members
            .iter()
            .enumerate()
            .all(|(a, &i)| self.members[a + 1..].iter().all(|&j| tol.le(self.delta, m.d(i, j))))
    }
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}

struct Search<'a> {
    /// Compatibility graph, vertices renumbered by `order`.
    adj: &'a [Bits],
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Greedy colouring of `cand` in vertex order; returns vertices with the
    /// number of colours used so far, ascending.
    fn colour(&self, cand: &Bits) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(cand.count() as usize);
        let mut rest = cand.clone();
        let mut colour = 0;
        while !rest.is_empty() {
            colour += 1;
            let mut avail = rest.clone();
            for w in 0..avail.0.len() {
                while avail.0[w] != 0 {
                    let v = w * 64 + avail.0[w].trailing_zeros() as usize;
                    avail.clear(v);
                    rest.clear(v);
                    out.push((v, colour));
                    // remove compatible vertices: they cannot share this class
                    for (a, b) in avail.0.iter_mut().zip(&self.adj[v].0) {
                        *a &= !b;
                    }
                }
            }
        }
        out
    }

    fn expand(&mut self, mut cand: Bits) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let coloured = self.colour(&cand);
        for &(v, bound) in coloured.iter().rev() {
            if self.current.len() + bound <= self.best.len() {
                return Ok(());
            }
            self.current.push(v);
            let next = cand.and(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next)?;
            }
            self.current.pop();
            cand.clear(v);
        }
        Ok(())
    }
}

fn greedy(m: &MetricSpace, delta: f64, tol: Tolerance) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..m.n_points() {
        if chosen.iter().all(|&j| tol.le(delta, m.d(i, j))) {
            chosen.push(i);
        }
    }
    chosen
}

pub fn max_separated_set(m: &MetricSpace, delta: f64, mode: SeparationMode) -> Result<SeparatedSet> {
    max_separated_set_tol(m, delta, mode, Tolerance::default())
}

pub fn max_separated_set_tol(m: &MetricSpace, delta: f64, mode: SeparationMode, tol: Tolerance) -> Result<SeparatedSet> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let start = greedy(m, delta, tol);
    let node_budget = match mode {
        SeparationMode::Greedy => {
            return Ok(SeparatedSet {
                delta,
                members: start,
                certified_max: false,
                nodes: 0,
            })
        }
        SeparationMode::Exact { node_budget } => node_budget,
    };
    let n = m.n_points();
    // vertices sorted by compatibility degree, highest first
    let degree: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && tol.le(delta, m.d(i, j))).count())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(degree[i]), i));
    let mut adj = vec![Bits::empty(n); n];
    for a in 0..n {
        for b in 0..n {
            if a != b && tol.le(delta, m.d(order[a], order[b])) {
                adj[a].set(b);
            }
        }
    }
    let mut position = vec![0; n];
    for (a, &i) in order.iter().enumerate() {
        position[i] = a;
    }
    let mut search = Search {
        adj: &adj,
        best: start.iter().map(|&i| position[i]).collect(),
        current: Vec::new(),
        nodes: 0,
        budget: node_budget,
    };
    let mut all = Bits::empty(n);
    for a in 0..n {
        all.set(a);
    }
    if n > 0 {
        search.expand(all)?;
    }
    let mut members: Vec<usize> = search.best.iter().map(|&a| order[a]).collect();
    members.sort_unstable();
    Ok(SeparatedSet {
        delta,
        members,
        certified_max: true,
        nodes: search.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_cycle, build_diamond};
    use crate::metric::shortest_path_metric;

    /// Subset enumeration, independent of the search above.
    fn brute_force(m: &MetricSpace, delta: f64) -> usize {
        let n = m.n_points();
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let pts: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let ok = pts.iter().all(|&i| pts.iter().all(|&j| i == j || m.d(i, j) >= delta));
            if ok {
                best = best.max(pts.len());
            }
        }
        best
    }

    #[test]
    fn diamond_one() {
        let m = shortest_path_metric(&build_diamond(1).unwrap().0).unwrap();
        let s1 = max_separated_set(&m, 1.0, SeparationMode::exact()).unwrap();
        assert_eq!(s1.len(), 4);
        let s2 = max_separated_set(&m, 2.0, SeparationMode::exact()).unwrap();
        assert_eq!(s2.len(), 2);
        assert!(s2.certified_max && s2.is_valid(&m, Tolerance::default()));
        assert_eq!(brute_force(&m, 2.0), 2);
    }

    #[test]
    fn small_delta_takes_everything() {
        let m = shortest_path_metric(&build_diamond(2).unwrap().0).unwrap();
        let s = max_separated_set(&m, m.min_positive_distance(), SeparationMode::exact()).unwrap();
        assert_eq!(s.len(), m.n_points());
        assert!(s.certified_max);
    }

    #[test]
    fn matches_enumeration_on_cycles_and_d2() {
        for n in 3..=14 {
            let m = shortest_path_metric(&build_cycle(n).unwrap()).unwrap();
            for delta in 1..=n / 2 {
                let delta = delta as f64;
                let exact = max_separated_set(&m, delta, SeparationMode::exact()).unwrap();
                let greedy = max_separated_set(&m, delta, SeparationMode::Greedy).unwrap();
                assert_eq!(exact.len(), brute_force(&m, delta));
                assert!(exact.len() >= greedy.len());
                assert!(greedy.is_valid(&m, Tolerance::default()));
            }
        }
        let m = shortest_path_metric(&build_diamond(2).unwrap().0).unwrap();
        for delta in 1..=4 {
            let exact = max_separated_set(&m, delta as f64, SeparationMode::exact()).unwrap();
            assert_eq!(exact.len(), brute_force(&m, delta as f64));
        }
    }

    #[test]
    fn budget_and_bad_delta() {
        let m = shortest_path_metric(&build_diamond(3).unwrap().0).unwrap();
        let r = max_separated_set(&m, 2.0, SeparationMode::Exact { node_budget: 0 });
        assert!(matches!(r, Err(Error::BudgetExceeded(0))));
        assert!(max_separated_set(&m, 0.0, SeparationMode::Greedy).is_err());
    }
}
