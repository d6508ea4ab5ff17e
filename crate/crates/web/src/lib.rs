//! Browser bindings for a few interactive operations. Every export returns a
//! JSON string; the pure functions underneath are also usable natively.

use serde_json::{json, Value};
use testspaces::embed::diamond::{embedding_dim, m_of_eps, weighted_diamond_bound};
use testspaces::embed::{distortion, embed_weighted_diamond};
use testspaces::graphs::{build_diamond, generate_series_parallel, is_series_parallel, DiamondStructure, Edge, Removal, WeightedGraph};
use testspaces::metric::separated::DEFAULT_NODE_BUDGET;
use testspaces::metric::{max_separated_set, shortest_path_metric, SeparationMode};
use wasm_bindgen::prelude::*;

/// Largest diamond level the page will draw.
pub const MAX_VIEW_LEVEL: u32 = 4;
/// Largest weighted-diamond level the page will embed.
pub const MAX_EMBED_LEVEL: u32 = 4;
const SEPARATION_BUDGET: u64 = DEFAULT_NODE_BUDGET / 10;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Distortion of the weighted-diamond embedding at `level`, with the
/// level-independent bound and the extremal pairs by label.
pub fn weighted_diamond_report(level: u32, eps: f64) -> Result<Value, String> {
    if level > MAX_EMBED_LEVEL {
        return Err(format!("level must be at most {MAX_EMBED_LEVEL}"));
    }
    let (g, _, e) = embed_weighted_diamond(level, eps).map_err(err)?;
    let m = shortest_path_metric(&g).map_err(err)?;
    let report = distortion(&e, &m).map_err(err)?;
    let pair = |p: Option<(usize, usize)>| p.map(|(i, j)| [g.label(i), g.label(j)]);
    Ok(json!({
        "level": level,
        "eps": eps,
        "vertices": g.n_vertices(),
        "edges": g.n_edges(),
        "dimension": embedding_dim(level),
        "lip": report.lip,
        "lip_inv": report.lip_inv,
        "distortion": report.distortion,
        "expand_pair": pair(report.witness_expand),
        "contract_pair": pair(report.witness_contract),
        "m": m_of_eps(eps).map_err(err)?,
        "bound": weighted_diamond_bound(eps).map_err(err)?,
    }))
}

/// Positions in the unit square. Each subdiamond owns an x-interval whose
/// left half goes to the `a` side and right half to the `b` side; a split
/// vertex sits at the centre of its half, halfway up between the endpoints.
fn layout(st: &DiamondStructure) -> Vec<[f64; 2]> {
    let mut pos = vec![[0.5, 0.0]; st.n_vertices()];
    pos[st.root().top] = [0.5, 1.0];
    let mut interval = vec![(0.0, 1.0); st.subdiamonds.len()];
    for (i, sub) in st.subdiamonds.iter().enumerate() {
        let Some((a, b)) = sub.split else { continue };
        let (lo, hi) = interval[i];
        let mid = (lo + hi) / 2.0;
        let y = (pos[sub.bottom][1] + pos[sub.top][1]) / 2.0;
        pos[a] = [(lo + mid) / 2.0, y];
        pos[b] = [(mid + hi) / 2.0, y];
        // Children in lineage order: (u, a), (a, v), (u, b), (b, v).
        for (k, &c) in sub.children.iter().enumerate() {
            interval[c] = if k < 2 { (lo, mid) } else { (mid, hi) };
        }
    }
    pos
}

/// `D_level` laid out in the plane, with generations and a maximum
/// `2^p`-separated set.
pub fn diamond_view(level: u32, p: u32) -> Result<Value, String> {
    if level > MAX_VIEW_LEVEL {
        return Err(format!("level must be at most {MAX_VIEW_LEVEL}"));
    }
    if p > level {
        return Err(format!("p must be at most the level {level}"));
    }
    let (g, st) = build_diamond(level).map_err(err)?;
    let m = shortest_path_metric(&g).map_err(err)?;
    let delta = (1u64 << p) as f64;
    let set = match max_separated_set(
        &m,
        delta,
        SeparationMode::Exact {
            node_budget: SEPARATION_BUDGET,
        },
    ) {
        Ok(s) => s,
        Err(testspaces::Error::BudgetExceeded(_)) => max_separated_set(&m, delta, SeparationMode::Greedy).map_err(err)?,
        Err(e) => return Err(err(e)),
    };
    Ok(json!({
        "level": level,
        "p": p,
        "labels": g.labels(),
        "positions": layout(&st),
        "generation": st.generation,
        "edges": g.edges().iter().map(|e| [e.u, e.v]).collect::<Vec<_>>(),
        "separated": set.members,
        "separated_certified": set.certified_max,
    }))
}

/// A seeded series-parallel graph, its recognition result, and the result
/// after attaching a K4.
pub fn series_parallel(steps: usize, seed: u64, remove_prob: f64) -> Result<Value, String> {
    if steps > 200 {
        return Err("steps must be at most 200".into());
    }
    let removal = if remove_prob > 0.0 {
        Removal::Probability(remove_prob)
    } else {
        Removal::None
    };
    let g = generate_series_parallel(steps, &removal, seed).map_err(err)?;
    let n = g.n_vertices();
    let mut edges = g.edges().to_vec();
    edges.push(Edge { u: 0, v: n, w: 1.0 });
    for a in 0..4 {
        for b in a + 1..4 {
            edges.push(Edge {
                u: n + a,
                v: n + b,
                w: 1.0,
            });
        }
    }
    let with_k4 = WeightedGraph::new(n + 4, edges).map_err(err)?;
    Ok(json!({
        "vertices": n,
        "edges": g.edges().iter().map(|e| [e.u, e.v]).collect::<Vec<_>>(),
        "series_parallel": is_series_parallel(&g),
        "with_k4_series_parallel": is_series_parallel(&with_k4),
    }))
}

fn export(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = weightedDiamondReport)]
pub fn weighted_diamond_report_js(level: u32, eps: f64) -> Result<String, JsValue> {
    export(weighted_diamond_report(level, eps))
}

#[wasm_bindgen(js_name = diamondView)]
pub fn diamond_view_js(level: u32, p: u32) -> Result<String, JsValue> {
    export(diamond_view(level, p))
}

#[wasm_bindgen(js_name = seriesParallel)]
pub fn series_parallel_js(steps: u32, seed: u32, remove_prob: f64) -> Result<String, JsValue> {
    export(series_parallel(steps as usize, seed as u64, remove_prob))
}
