//! Independent reference implementations used as oracles by the integration
//! tests. Nothing here calls into the library's algorithms.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use testspaces::graphs::{Edge, WeightedGraph};
use testspaces::metric::MetricSpace;

pub const REL: f64 = 1e-9;
pub const ABS: f64 = 1e-12;

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= (REL * a.abs().max(b.abs())).max(ABS)
}

/// Connected graph on `n` vertices: a random spanning tree plus `extra`
/// random chords, integer weights in `1..=max_weight`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_weight: u32) -> WeightedGraph {
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        edges.push(Edge {
            u,
            v,
            w: rng.gen_range(1..=max_weight) as f64,
        });
    }
    for _ in 0..extra {
        if n < 2 {
            break;
        }
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (u, v) = (a.min(b), a.max(b));
        if u != v && seen.insert((u, v)) {
            edges.push(Edge {
                u,
                v,
                w: rng.gen_range(1..=max_weight) as f64,
            });
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// All-pairs distances by Floyd-Warshall, row-major.
pub fn floyd(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n_vertices();
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for e in g.edges() {
        let w = d[e.u * n + e.v].min(e.w);
        d[e.u * n + e.v] = w;
        d[e.v * n + e.u] = w;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    d
}

pub fn floyd_metric(g: &WeightedGraph) -> MetricSpace {
    MetricSpace::from_matrix(g.n_vertices(), floyd(g)).unwrap()
}

/// Hop distances from `source` by breadth-first search.
pub fn bfs(g: &WeightedGraph, source: usize) -> Vec<Option<usize>> {
    let n = g.n_vertices();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut dist = vec![None; n];
    dist[source] = Some(0);
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(dist[x].unwrap() + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// `(max expansion) * (max contraction)` of `f` over all pairs, from the
/// definition.
pub fn map_distortion_oracle(f: &[usize], source: &MetricSpace, target: &MetricSpace) -> f64 {
    let mut expand: f64 = 0.0;
    let mut contract: f64 = 0.0;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let s = source.d(i, j);
            let h = target.d(f[i], f[j]);
            expand = expand.max(h / s);
            contract = contract.max(if h == 0.0 { f64::INFINITY } else { s / h });
        }
    }
    if f.len() < 2 {
        1.0
    } else {
        expand * contract
    }
}

/// Every injective map in lexicographic order, via an explicit stack.
pub fn for_each_injection(k: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    if k == 0 {
        visit(&[]);
        return;
    }
    let mut map = vec![0usize; k];
    let mut used = vec![false; m];
    let mut next = vec![0usize; k];
    let mut depth = 0usize;
    loop {
        if next[depth] >= m {
            if depth == 0 {
                return;
            }
            next[depth] = 0;
            depth -= 1;
            used[map[depth]] = false;
            next[depth] += 1;
            continue;
        }
        let t = next[depth];
        if used[t] {
            next[depth] += 1;
            continue;
        }
        map[depth] = t;
        if depth + 1 == k {
            visit(&map);
            next[depth] += 1;
        } else {
            used[t] = true;
            depth += 1;
        }
    }
}

/// Optimal distortion by exhaustive enumeration, with the lexicographically
/// first map whose distortion is within tolerance of it.
pub fn exhaustive_min_distortion(source: &MetricSpace, target: &MetricSpace) -> (f64, Vec<usize>) {
    let k = source.n_points();
    let mut best = f64::INFINITY;
    for_each_injection(k, target.n_points(), |f| {
        best = best.min(map_distortion_oracle(f, source, target));
    });
    let limit = best + (REL * best).max(ABS);
    let mut first = None;
    for_each_injection(k, target.n_points(), |f| {
        if first.is_none() && map_distortion_oracle(f, source, target) <= limit {
            first = Some(f.to_vec());
        }
    });
    let map = first.unwrap();
    (map_distortion_oracle(&map, source, target), map)
}

/// Largest subset with all pairwise distances at least `delta`, by subset
/// enumeration.
pub fn brute_max_separated(m: &MetricSpace, delta: f64) -> usize {
    let n = m.n_points();
    assert!(n <= 16);
    let ok = |i: usize, j: usize| m.d(i, j) >= delta || close(m.d(i, j), delta);
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if members.iter().enumerate().all(|(a, &i)| members[a + 1..].iter().all(|&j| ok(i, j))) {
            best = size;
        }
    }
    best
}

/// Two-sided certificate `2^p d_T <= d_D(f) <= 2^(k+p) d_T`, scanned pair by
/// pair.
pub fn certificate_holds(f: &[usize], tree: &MetricSpace, diamond: &MetricSpace, p: u32, k: u32) -> bool {
    let lower = (1u64 << p) as f64;
    let upper = (1u64 << (k + p)) as f64;
    let le = |a: f64, b: f64| a <= b || close(a, b);
    (0..f.len()).all(|u| {
        (u + 1..f.len()).all(|v| {
            let dt = tree.d(u, v);
            let dd = diamond.d(f[u], f[v]);
            le(lower * dt, dd) && le(dd, upper * dt)
        })
    })
}

/// A uniformly random injective map of `k` points into `m`.
pub fn random_injection(rng: &mut ChaCha8Rng, k: usize, m: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    for i in 0..k {
        let j = rng.gen_range(i..m);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// Least `m` with `q + ... + q^m >= 1 + q^m` for `q = 1/2 + num/den`,
/// decided in exact rational arithmetic.
pub fn m_oracle(num: i64, den: i64) -> u32 {
    use num_rational::Ratio;
    let q = Ratio::new(1, 2) + Ratio::new(num, den);
    let mut power = Ratio::from_integer(1i64);
    let mut sum = Ratio::from_integer(0i64);
    for m in 1..64 {
        power *= q;
        sum += power;
        if sum >= Ratio::from_integer(1) + power {
            return m;
        }
    }
    panic!("no m below 64");
}

/// `2^(m+1) (1/2 + eps) / ((1/2 - eps) sqrt(eps + eps^2))`.
pub fn bound_oracle(eps: f64, m: u32) -> f64 {
    (1u64 << (m + 1)) as f64 * (0.5 + eps) / ((0.5 - eps) * (eps + eps * eps).sqrt())
}

/// `lip(F_1^-1)` in closed form.
pub fn level_one_oracle(eps: f64) -> f64 {
    (1.0 + 2.0 * eps) / (2.0 * (eps + eps * eps).sqrt())
}
