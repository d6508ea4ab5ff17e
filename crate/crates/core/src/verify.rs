//! Verification suites: each runs one family of exhaustive checks and returns
//! a [`CheckReport`].

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde_json::json;

use crate::analysis::{
    entropy_check, exits, generations, subdiamonds_of_height, verify_generation_components, verify_generation_neighborhood, CheckReport,
    EntropySearch, Stopwatch,
};
use crate::embed::diamond::{check_weight_classes, edge_isometry_violations, embed_structure, ExactCoords};
use crate::embed::{distortion, min_distortion, weighted_diamond_bound};
use crate::error::{Error, Result};
use crate::graphs::diamond::parse_rational;
use crate::graphs::{
    build_cycle, build_diamond, build_weighted_diamond, build_weighted_diamond_exact, generate_series_parallel, is_series_parallel, Removal,
};
use crate::metric::separated::DEFAULT_NODE_BUDGET;
use crate::metric::{geodesic_bigon, shortest_path_metric, Tolerance};
use crate::trees::unlabeled_trees;

pub const SUITES: [&str; 9] = [
    "entropy",
    "generations",
    "exits",
    "claim42",
    "rr",
    "edgeiso",
    "bound",
    "sp",
    "bigon",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tolerance: Tolerance,
    /// Search-node budget for the exact searches.
    pub budget: u64,
    /// Use exact rational weights where a suite supports them.
    pub rational: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance: Tolerance::default(),
            budget: DEFAULT_NODE_BUDGET,
            rational: false,
        }
    }
}

fn absorb(into: &mut CheckReport, part: CheckReport) {
    into.violations.extend(part.violations);
    into.tight_cases.extend(part.tight_cases);
    into.observations.extend(part.observations);
    into.certified &= part.certified;
}

/// Entropy bound on every subdiamond of `D_level`, for the given `p` or for
/// every `p` in `0..=level`.
pub fn entropy_suite(level: u32, p: Option<u32>, opts: &VerifyOptions) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    let (g, st) = build_diamond(level)?;
    let m = shortest_path_metric(&g)?;
    let mut report = CheckReport::new("entropy", json!({ "level": level, "p": p, "budget": opts.budget }));
    let ps: Vec<u32> = match p {
        Some(p) => vec![p],
        None => (0..=level).collect(),
    };
    for p in ps {
        let part = entropy_check(&st, &m, p, EntropySearch::Exact { node_budget: opts.budget })?;
        let tight = part.tight_cases.len();
        absorb(&mut report, part);
        report.observations.push(json!({ "p": p, "tight_cases": tight }));
    }
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// Generation sizes and both neighbourhood facts for every `D_n`,
/// `1 <= n <= max_level`, and every generation.
pub fn generations_suite(max_level: u32) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    let mut report = CheckReport::new("generations", json!({ "max_level": max_level }));
    for level in 1..=max_level {
        let (g, st) = build_diamond(level)?;
        let sizes: Vec<usize> = generations(&st).iter().map(Vec::len).collect();
        for (i, &size) in sizes.iter().enumerate() {
            let expected = 2 * 4usize.pow(level - 1 - i as u32);
            if size != expected {
                report
                    .violations
                    .push(json!({ "level": level, "r": i + 1, "size": size, "expected": expected }));
            }
        }
        report.observations.push(json!({ "level": level, "generation_sizes": sizes }));
        for r in 1..=level {
            absorb(&mut report, verify_generation_neighborhood(&st, &g, r)?);
            absorb(&mut report, verify_generation_components(&st, &g, r)?);
        }
    }
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// Exits of every proper subdiamond of every `D_n`, `1 <= n <= max_level`,
/// plus the subdiamond counts per height.
pub fn exits_suite(max_level: u32) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    let mut report = CheckReport::new("exits", json!({ "max_level": max_level }));
    for level in 1..=max_level {
        let (g, st) = build_diamond(level)?;
        let mut checked = 0;
        for node in 1..st.subdiamonds.len() {
            let x = exits(&st, &g, node)?;
            checked += 1;
            if !x.separates {
                report.violations.push(json!({
                    "level": level,
                    "subdiamond": st.subdiamonds[node].path,
                    "bottom": x.bottom,
                    "top": x.top,
                }));
            }
        }
        for h in 0..=level {
            let count = subdiamonds_of_height(&st, h)?.len();
            if count != 4usize.pow(level - h) {
                report.violations.push(json!({ "level": level, "height_exp": h, "count": count }));
            }
        }
        report.observations.push(json!({ "level": level, "proper_subdiamonds": checked }));
    }
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// Shortest paths in `W_level` use each weight class at most twice and the
/// top diagonal at most once. `all_paths` enumerates every shortest path
/// within that path budget instead of one canonical path per pair.
pub fn weight_classes_suite(level: u32, eps: &str, all_paths: Option<u64>, opts: &VerifyOptions) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    let (g, st) = if opts.rational {
        build_weighted_diamond_exact(level, &parse_rational(eps)?)?
    } else {
        let e: f64 = eps.parse().map_err(|_| Error::InvalidParameter(format!("bad eps {eps:?}")))?;
        build_weighted_diamond(level, e)?
    };
    let mut report = CheckReport::new(
        "claim42",
        json!({ "level": level, "eps": eps, "all_paths": all_paths, "rational": opts.rational }),
    );
    match check_weight_classes(&g, &st, all_paths) {
        Ok(r) => {
            for (s, t, path) in r.violations {
                report.violations.push(json!({ "source": s, "target": t, "path": path }));
            }
            report
                .observations
                .push(json!({ "pairs": r.pairs, "paths": r.paths, "max_per_class": r.max_per_class }));
        }
        Err(Error::BudgetExceeded(b)) => {
            report.certified = false;
            report.observations.push(json!({ "budget_exceeded": b }));
        }
        Err(e) => return Err(e),
    }
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// Minimum distortion of `C_cycle` into every tree on `min_tree..=max_tree`
/// vertices against the lower bound `cycle / 3 - 1`.
pub fn cycle_trees_suite(cycle: usize, min_tree: usize, max_tree: usize, opts: &VerifyOptions) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    if min_tree < cycle {
        return Err(Error::InvalidParameter(format!(
            "trees need at least {cycle} vertices to receive an injective map"
        )));
    }
    let source = shortest_path_metric(&build_cycle(cycle)?)?;
    let bound = cycle as f64 / 3.0 - 1.0;
    let mut trees = Vec::new();
    for n in min_tree..=max_tree {
        trees.extend(unlabeled_trees(n)?);
    }
    let run = |t: &crate::graphs::WeightedGraph| -> Result<_> { min_distortion(&source, &shortest_path_metric(t)?, opts.budget) };
    #[cfg(feature = "parallel")]
    let results = trees.par_iter().map(run).collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let results = trees.iter().map(run).collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new(
        "rr",
        json!({ "cycle": cycle, "min_tree": min_tree, "max_tree": max_tree, "bound": bound, "budget": opts.budget }),
    );
    let mut smallest = f64::INFINITY;
    for (t, r) in trees.iter().zip(&results) {
        smallest = smallest.min(r.value);
        report.certified &= r.certified;
        if !opts.tolerance.le(bound, r.value) {
            let edges: Vec<(usize, usize)> = t.edges().iter().map(|e| (e.u, e.v)).collect();
            report
                .violations
                .push(json!({ "tree_edges": edges, "value": r.value, "map": r.map, "certified": r.certified }));
        }
    }
    report.observations.push(json!({
        "trees": trees.len(),
        "smallest_distortion": smallest,
        "uncertified": results.iter().filter(|r| !r.certified).count(),
        "nodes": results.iter().map(|r| r.nodes).sum::<u64>(),
    }));
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// Every edge of `W_n`, `1 <= n <= max_level`, has image length equal to its
/// weight; exactly (on squared lengths) in rational mode.
pub fn edgeiso_suite(max_level: u32, eps: &str, opts: &VerifyOptions) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    let exact_eps = parse_rational(eps)?;
    let eps_f: f64 = eps
        .parse()
        .or_else(|_| num_traits::ToPrimitive::to_f64(&exact_eps).ok_or(()))
        .map_err(|_| Error::InvalidParameter(format!("bad eps {eps:?}")))?;
    let mut report = CheckReport::new("edgeiso", json!({ "max_level": max_level, "eps": eps, "rational": opts.rational }));
    for level in 1..=max_level {
        let (g, st) = build_weighted_diamond(level, eps_f)?;
        let e = embed_structure(&st, eps_f)?;
        for (edge, image, weight) in edge_isometry_violations(&g, &e, opts.tolerance) {
            report
                .violations
                .push(json!({ "level": level, "edge": edge, "image": image, "weight": weight }));
        }
        if opts.rational {
            let (g, st) = build_weighted_diamond_exact(level, &exact_eps)?;
            for edge in ExactCoords::new(&st, &exact_eps)?.edge_violations(&g)? {
                report.violations.push(json!({ "level": level, "edge": edge, "exact": true }));
            }
        }
        report.observations.push(json!({ "level": level, "edges": g.n_edges() }));
    }
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// Observed distortion of the weighted-diamond embedding for every level up
/// to `max_level` against the closed-form bound.
pub fn bound_suite(eps: f64, max_level: u32, opts: &VerifyOptions) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    let bound = weighted_diamond_bound(eps)?;
    let tol = opts.tolerance;
    let mut report = CheckReport::new("bound", json!({ "eps": eps, "max_level": max_level, "bound": bound }));
    let mut previous = 0.0;
    let mut nondecreasing = true;
    for level in 1..=max_level {
        let (g, st) = build_weighted_diamond(level, eps)?;
        let e = embed_structure(&st, eps)?;
        let r = distortion(&e, &shortest_path_metric(&g)?)?;
        let entry = json!({
            "level": level,
            "lip": r.lip,
            "lip_inv": r.lip_inv,
            "distortion": r.distortion,
            "witness_contract": r.witness_contract,
        });
        if !tol.le(r.lip, 1.0) || !tol.le(r.distortion, bound) {
            report.violations.push(entry.clone());
        }
        report.observations.push(entry);
        nondecreasing &= r.distortion >= previous;
        previous = r.distortion;
    }
    report.observations.push(json!({ "nondecreasing_in_level": nondecreasing }));
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// A seeded series-parallel graph passes recognition, and gluing a `K_4`
/// onto it makes recognition fail.
pub fn sp_suite(steps: usize, seed: u64, removal: &Removal) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    let g = generate_series_parallel(steps, removal, seed)?;
    let mut report = CheckReport::new("sp", json!({ "steps": steps, "seed": seed, "removal": removal }));
    if !is_series_parallel(&g) {
        report.violations.push(json!({ "graph_edges": g.n_edges(), "recognised": false }));
    }
    let n = g.n_vertices();
    let mut edges: Vec<_> = g.edges().to_vec();
    // K_4 on vertex 0 and three fresh vertices
    let k4 = [0, n, n + 1, n + 2];
    for i in 0..4 {
        for j in i + 1..4 {
            edges.push(crate::graphs::Edge {
                u: k4[i],
                v: k4[j],
                w: 1.0,
            });
        }
    }
    let with_k4 = crate::graphs::WeightedGraph::new(n + 3, edges)?;
    if is_series_parallel(&with_k4) {
        report.violations.push(json!({ "with_k4": true, "recognised": true }));
    }
    report.observations.push(json!({ "vertices": n, "edges": g.n_edges() }));
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// The geodesic bigon of `D_n` is an isometric cycle of length `2^(n+1)` for
/// `1 <= n <= max_level`. A cycle of length `4^n` cannot be isometric once
/// `n >= 2`, since half its length exceeds the diameter `2^n`.
pub fn bigon_suite(max_level: u32) -> Result<CheckReport> {
    let clock = Stopwatch::start();
    let mut report = CheckReport::new("bigon", json!({ "max_level": max_level }));
    for level in 1..=max_level {
        let (g, st) = build_diamond(level)?;
        let b = geodesic_bigon(&st, &g)?;
        let expected = (1u64 << (level + 1)) as f64;
        if !b.isometric || b.length != expected {
            report
                .violations
                .push(json!({ "level": level, "length": b.length, "isometric": b.isometric }));
        }
        let diameter = shortest_path_metric(&g)?.diameter();
        report.observations.push(json!({
            "level": level,
            "bigon_length": b.length,
            "isometric": b.isometric,
            "cycle_length_4n_isometric_possible": (4f64.powi(level as i32) / 2.0) <= diameter,
        }));
    }
    report.runtime_ms = clock.ms();
    Ok(report)
}

/// Every suite at its default parameters.
pub fn all_suites(opts: &VerifyOptions) -> Result<Vec<CheckReport>> {
    Ok(vec![
        entropy_suite(4, None, opts)?,
        generations_suite(4)?,
        exits_suite(4)?,
        weight_classes_suite(4, if opts.rational { "1/4" } else { "0.25" }, None, opts)?,
        cycle_trees_suite(7, 7, 10, opts)?,
        edgeiso_suite(5, "0.25", opts)?,
        bound_suite(0.25, 5, opts)?,
        sp_suite(10, 7, &Removal::None)?,
        bigon_suite(4)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let opts = VerifyOptions::default();
        for r in [
            entropy_suite(2, None, &opts).unwrap(),
            generations_suite(3).unwrap(),
            exits_suite(3).unwrap(),
            weight_classes_suite(2, "0.25", None, &opts).unwrap(),
            weight_classes_suite(2, "0.25", Some(1_000_000), &opts).unwrap(),
            cycle_trees_suite(6, 6, 7, &opts).unwrap(),
            edgeiso_suite(2, "1/4", &VerifyOptions { rational: true, ..opts }).unwrap(),
            bound_suite(0.25, 3, &opts).unwrap(),
            sp_suite(10, 7, &Removal::None).unwrap(),
            bigon_suite(3).unwrap(),
        ] {
            assert!(r.passed() && r.certified, "{}: {:?}", r.check, r.violations);
        }
    }

    #[test]
    fn budget_marks_uncertified() {
        let opts = VerifyOptions {
            budget: 3,
            ..VerifyOptions::default()
        };
        let r = cycle_trees_suite(6, 6, 6, &opts).unwrap();
        assert!(!r.certified);
        let r = weight_classes_suite(2, "0.25", Some(3), &opts).unwrap();
        assert!(!r.certified);
    }

    #[test]
    fn bigon_records_the_literal_cycle() {
        let r = bigon_suite(2).unwrap();
        assert_eq!(r.observations[0]["cycle_length_4n_isometric_possible"], true);
        assert_eq!(r.observations[1]["cycle_length_4n_isometric_possible"], false);
    }

    #[test]
    fn rr_rejects_small_trees() {
        assert!(cycle_trees_suite(7, 6, 7, &VerifyOptions::default()).is_err());
    }
}
