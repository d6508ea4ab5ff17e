//! JSON interchange for graphs, and the family descriptions that let a file
//! be rebuilt or embedded.
//!
//! A graph file looks like
//! `{"n": 4, "edges": [[0, 2, 1.0], ...], "labels": [...], "structure": {...}, "family": {...}}`
//! where `structure` and `family` are optional. Exact weights are written as
//! `"p/q"` strings.

use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{shortest_path_metric, DEFAULT_MAX_POINTS};

use super::diamond::parse_rational;
use super::families::cartesian_product;
use super::{
    build_binary_tree, build_cycle, build_diamond, build_path, build_weighted_diamond, build_weighted_diamond_exact, dinfinity_ball,
    generate_series_parallel, glue, DiamondStructure, Edge, GluedSpace, Removal, WeightedGraph,
};

/// A recipe for one of the built-in families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Family {
    Tree {
        depth: u32,
    },
    Diamond {
        level: u32,
    },
    Wdiamond {
        level: u32,
        eps: f64,
        /// Rational form of `eps`; when present the weights are exact.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exact_eps: Option<String>,
    },
    Cycle {
        n: usize,
    },
    Path {
        n: usize,
    },
    Sp {
        steps: usize,
        seed: u64,
        removal: Removal,
    },
    Dinfty {
        radius: u64,
    },
    Glue {
        blocks: Vec<Block>,
        /// Empty means the smallest admissible integer lengths.
        path_lengths: Vec<u64>,
    },
    L1prod {
        factors: Vec<Family>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub family: Family,
    pub base: usize,
}

/// A family rebuilt from its recipe.
#[derive(Debug, Clone)]
pub struct Built {
    pub graph: WeightedGraph,
    pub structure: Option<DiamondStructure>,
    pub glued: Option<GluedSpace>,
}

impl Family {
    pub fn build(&self) -> Result<Built> {
        let plain = |graph| Built {
            graph,
            structure: None,
            glued: None,
        };
        Ok(match self {
            Family::Tree { depth } => plain(build_binary_tree(*depth)?),
            Family::Diamond { level } => {
                let (graph, st) = build_diamond(*level)?;
                Built {
                    graph,
                    structure: Some(st),
                    glued: None,
                }
            }
            Family::Wdiamond { level, eps, exact_eps } => {
                let (graph, st) = match exact_eps {
                    Some(s) => build_weighted_diamond_exact(*level, &parse_rational(s)?)?,
                    None => build_weighted_diamond(*level, *eps)?,
                };
                Built {
                    graph,
                    structure: Some(st),
                    glued: None,
                }
            }
            Family::Cycle { n } => plain(build_cycle(*n)?),
            Family::Path { n } => plain(build_path(*n)?),
            Family::Sp { steps, seed, removal } => plain(generate_series_parallel(*steps, removal, *seed)?),
            Family::Dinfty { radius } => plain(dinfinity_ball(*radius)?.graph),
            Family::Glue { blocks, path_lengths } => {
                let spaces = blocks
                    .iter()
                    .map(|b| {
                        let g = b.family.build()?.graph;
                        Ok((shortest_path_metric(&g)?.with_labels(g.labels().to_vec())?, b.base))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let lengths = if path_lengths.is_empty() {
                    spaces
                        .windows(2)
                        .map(|w| w[0].0.diameter().max(w[1].0.diameter()).ceil().max(1.0) as u64)
                        .collect()
                } else {
                    path_lengths.clone()
                };
                let glued = glue(spaces, lengths)?;
                Built {
                    graph: glued.combined.clone(),
                    structure: None,
                    glued: Some(glued),
                }
            }
            Family::L1prod { factors } => {
                let graphs = factors.iter().map(|f| Ok(f.build()?.graph)).collect::<Result<Vec<_>>>()?;
                plain(cartesian_product(&graphs, DEFAULT_MAX_POINTS)?)
            }
        })
    }

    /// The same recipe with glue path lengths made explicit.
    pub fn resolved(&self, built: &Built) -> Family {
        match (self, &built.glued) {
            (Family::Glue { blocks, .. }, Some(g)) => Family::Glue {
                blocks: blocks.clone(),
                path_lengths: g.path_lengths.clone(),
            },
            _ => self.clone(),
        }
    }
}

/// Compact specs such as `tree:2`, `diamond:3`, `wdiamond:2:0.25`,
/// `wdiamond:2:1/4` (exact), `cycle:5`, `path:3`, `dinfty:4`, `sp:10:7`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse family spec {spec:?}"));
        let parts: Vec<&str> = spec.split(':').collect();
        let int = |i: usize| -> Result<u64> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let family = match (parts[0], parts.len()) {
            ("tree", 2) => Family::Tree { depth: int(1)? as u32 },
            ("diamond", 2) => Family::Diamond { level: int(1)? as u32 },
            ("wdiamond", 3) => {
                let text = parts[2];
                if text.contains('/') {
                    let r = parse_rational(text)?;
                    Family::Wdiamond {
                        level: int(1)? as u32,
                        eps: r.to_f64().ok_or_else(bad)?,
                        exact_eps: Some(text.to_string()),
                    }
                } else {
                    Family::Wdiamond {
                        level: int(1)? as u32,
                        eps: text.parse().map_err(|_| bad())?,
                        exact_eps: None,
                    }
                }
            }
            ("cycle", 2) => Family::Cycle { n: int(1)? as usize },
            ("path", 2) => Family::Path { n: int(1)? as usize },
            ("dinfty", 2) => Family::Dinfty { radius: int(1)? },
            ("sp", 3) => Family::Sp {
                steps: int(1)? as usize,
                seed: int(2)?,
                removal: Removal::None,
            },
            _ => return Err(bad()),
        };
        Ok(family)
    }
}

/// `family` or `family@base`, as used for glue blocks.
impl FromStr for Block {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (family, base) = match spec.rsplit_once('@') {
            Some((f, b)) => (
                f,
                b.parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad base point in {spec:?}")))?,
            ),
            None => (spec, 0),
        };
        Ok(Block {
            family: family.parse()?,
            base,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Float(f64),
    /// `"p/q"`.
    Exact(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, Weight)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<DiamondStructure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
}

impl GraphFile {
    pub fn new(g: &WeightedGraph, structure: Option<DiamondStructure>, family: Option<Family>) -> Self {
        let edges = match g.exact_weights() {
            Some(exact) => g
                .edges()
                .iter()
                .zip(exact)
                .map(|(e, w)| (e.u, e.v, Weight::Exact(w.to_string())))
                .collect(),
            None => g.edges().iter().map(|e| (e.u, e.v, Weight::Float(e.w))).collect(),
        };
        Self {
            n: g.n_vertices(),
            edges,
            labels: g.labels().to_vec(),
            structure,
            family,
        }
    }

    pub fn graph(&self) -> Result<WeightedGraph> {
        let exact_count = self.edges.iter().filter(|e| matches!(e.2, Weight::Exact(_))).count();
        if exact_count != 0 && exact_count != self.edges.len() {
            return Err(Error::Format("weights must be all numbers or all \"p/q\" strings".into()));
        }
        let mut exact = Vec::with_capacity(exact_count);
        let mut edges = Vec::with_capacity(self.edges.len());
        for (u, v, w) in &self.edges {
            let w = match w {
                Weight::Float(w) => *w,
                Weight::Exact(s) => {
                    let r: BigRational = parse_rational(s)?;
                    let f = r
                        .to_f64()
                        .ok_or_else(|| Error::Format(format!("weight {s} is not representable")))?;
                    exact.push(r);
                    f
                }
            };
            edges.push(Edge { u: *u, v: *v, w });
        }
        let mut g = WeightedGraph::new(self.n, edges)?.with_labels(self.labels.clone())?;
        if exact_count > 0 {
            g = g.with_exact_weights(exact)?;
        }
        if let Some(st) = &self.structure {
            if st.n_vertices() != self.n || st.edge_level.len() != self.edges.len() {
                return Err(Error::Format("structure block does not match the graph".into()));
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
