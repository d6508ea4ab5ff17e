use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use testspaces::analysis::CheckReport;
use testspaces::embed::diamond::embed_structure;
use testspaces::embed::mindist::DEFAULT_BUDGET;
use testspaces::embed::{block_embedding, dinfinity_phi, distortion, glue_embed, min_distortion, Embedding, Norm};
use testspaces::graphs::diamond::{parse_rational, rational_to_f64};
use testspaces::graphs::io::{Block, Family, GraphFile};
use testspaces::graphs::{is_series_parallel, DihedralElement, Removal, WeightedGraph};
use testspaces::metric::separated::{max_separated_set_tol, DEFAULT_NODE_BUDGET};
use testspaces::metric::{shortest_path_metric, ExactMetric, SeparationMode, Tolerance};
use testspaces::verify::{self, VerifyOptions};
use testspaces::Error;

use crate::{Cli, Command, EmbedArgs, EmbedMethod, GenArgs, GenFamily, MetricArgs, MindistArgs, SeparatedArgs, Suite, VerifyArgs};

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BAD_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded(_) => EXIT_BUDGET,
            _ => EXIT_BAD_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

pub fn run(cli: &Cli) -> Outcome<u8> {
    match &cli.command {
        Command::Gen(args) => gen(cli, args),
        Command::Embed(args) => embed(args),
        Command::Verify(args) => run_verify(cli, args),
        Command::Mindist(args) => mindist(cli, args),
        Command::Metric(args) => metric(cli, args),
        Command::Separated(args) => separated(cli, args),
    }
}

fn tolerance(cli: &Cli) -> Outcome<Tolerance> {
    if !(cli.tolerance >= 0.0 && cli.tolerance.is_finite()) {
        return Err(Failure::input(format!("bad tolerance {}", cli.tolerance)));
    }
    Ok(Tolerance {
        rel: cli.tolerance,
        ..Tolerance::default()
    })
}

fn write_or_print(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(value: serde_json::Result<Value>) -> Outcome<()> {
    let text = value
        .and_then(|v| serde_json::to_string_pretty(&v))
        .map_err(|e| Failure::input(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn load(path: &Path) -> Outcome<(GraphFile, WeightedGraph)> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let file = GraphFile::from_json(&text)?;
    let graph = file.graph()?;
    Ok((file, graph))
}

fn family_of(cli: &Cli, family: &GenFamily) -> Outcome<Family> {
    Ok(match family {
        GenFamily::Tree { depth } => Family::Tree { depth: *depth },
        GenFamily::Diamond { level } => Family::Diamond { level: *level },
        GenFamily::Wdiamond { level, eps } => {
            let exact = parse_rational(eps)?;
            let eps_f = rational_to_f64(&exact)?;
            Family::Wdiamond {
                level: *level,
                eps: eps_f,
                exact_eps: cli.rational.then(|| exact.to_string()),
            }
        }
        GenFamily::Cycle { n } => Family::Cycle { n: *n },
        GenFamily::Path { n } => Family::Path { n: *n },
        GenFamily::Sp {
            steps,
            seed,
            remove_prob,
            remove,
        } => Family::Sp {
            steps: *steps,
            seed: *seed,
            removal: match (remove_prob, remove.is_empty()) {
                (Some(p), _) => Removal::Probability(*p),
                (None, false) => Removal::Mask(remove.clone()),
                (None, true) => Removal::None,
            },
        },
        GenFamily::Dinfty { radius } => Family::Dinfty { radius: *radius },
        GenFamily::Glue { blocks, path_lengths } => Family::Glue {
            blocks: blocks.iter().map(|b| b.parse::<Block>()).collect::<Result<_, _>>()?,
            path_lengths: path_lengths.clone(),
        },
        GenFamily::L1prod { factors } => Family::L1prod {
            factors: factors.iter().map(|f| f.parse::<Family>()).collect::<Result<_, _>>()?,
        },
    })
}

fn gen(cli: &Cli, args: &GenArgs) -> Outcome<u8> {
    let family = family_of(cli, &args.family)?;
    let built = family.build()?;
    let file = GraphFile::new(&built.graph, built.structure.clone(), Some(family.resolved(&built)));
    let mut text = file.to_json()?;
    text.push('\n');
    write_or_print(args.out.as_deref(), &text)?;
    if let Some(dot) = &args.dot {
        write_or_print(Some(dot), &built.graph.to_dot("testspace"))?;
    }
    Ok(0)
}

fn subset(e: &Embedding, points: &[usize]) -> Outcome<Embedding> {
    let coords = points.iter().flat_map(|&p| e.point(p).to_vec()).collect();
    let labels = points.iter().filter_map(|&p| e.labels().get(p).cloned()).collect();
    Ok(Embedding::new(e.norm(), e.dim(), coords)?.with_labels(labels)?)
}

fn embed(args: &EmbedArgs) -> Outcome<u8> {
    let norm: Norm = args.norm.parse()?;
    let (file, graph) = load(&args.input)?;
    let metric = shortest_path_metric(&graph)?;
    let mut extra = json!({});
    let (e, report) = match args.method {
        EmbedMethod::Wdiamond => {
            let st = file
                .structure
                .as_ref()
                .filter(|st| st.edge_level.len() == st.subdiamonds.len() && graph.n_edges() == st.subdiamonds.len())
                .ok_or_else(|| Failure::input("input is not a weighted diamond"))?;
            let eps = st.eps.ok_or_else(|| Failure::input("weighted diamond without eps"))?;
            let e = embed_structure(st, eps)?.with_norm(norm);
            let r = distortion(&e, &metric)?;
            (e, r)
        }
        EmbedMethod::Glue => {
            let family = file.family.as_ref().ok_or_else(|| Failure::input("input carries no glue family"))?;
            let Family::Glue { blocks, .. } = family else {
                return Err(Failure::input("input is not a glued space"));
            };
            let built = family.build()?;
            if built.graph != graph {
                return Err(Failure::input("graph does not match its glue recipe"));
            }
            let glued = built.glued.as_ref().expect("glue family builds a glued space");
            let mut block_lip_inv = Vec::new();
            let mut parts = Vec::new();
            for (b, (space, _)) in blocks.iter().zip(&glued.blocks) {
                let block = b.family.build()?;
                let e = block_embedding(&b.family, &block)?.with_norm(norm);
                block_lip_inv.push(distortion(&e, space)?.lip_inv);
                parts.push(e);
            }
            let e = glue_embed(&parts, glued)?;
            let r = distortion(&e, &metric)?;
            let worst = block_lip_inv.iter().copied().fold(1.0, f64::max);
            extra = json!({ "block_lip_inv": block_lip_inv, "lip_inv_bound": 4.0 * worst });
            (e, r)
        }
        EmbedMethod::DinftyPhi => {
            let e = dinfinity_phi(&graph)?.with_norm(norm);
            let words: Vec<u64> = graph
                .labels()
                .iter()
                .map(|l| DihedralElement::parse(l).map(DihedralElement::word_length).unwrap_or(0))
                .collect();
            let radius = words.iter().copied().max().unwrap_or(0);
            let interior: Vec<usize> = (0..graph.n_vertices()).filter(|&v| words[v] < radius).collect();
            let r = distortion(&subset(&e, &interior)?, &metric.restrict(&interior))?;
            extra = json!({ "restricted_to": "interior", "radius": radius, "interior_points": interior.len() });
            (e, r)
        }
    };
    if let Some(out) = &args.out {
        write_or_print(Some(out), &e.to_csv())?;
    }
    let mut value = json!({
        "method": match args.method {
            EmbedMethod::Wdiamond => "wdiamond",
            EmbedMethod::Glue => "glue",
            EmbedMethod::DinftyPhi => "dinfty-phi",
        },
        "points": e.n_points(),
        "dim": e.dim(),
        "norm": norm,
        "report": report,
    });
    if let (Value::Object(v), Value::Object(x)) = (&mut value, extra) {
        v.extend(x);
    }
    print_json(Ok(value))?;
    Ok(0)
}

fn run_verify(cli: &Cli, args: &VerifyArgs) -> Outcome<u8> {
    let opts = VerifyOptions {
        tolerance: tolerance(cli)?,
        budget: cli.budget.unwrap_or(DEFAULT_NODE_BUDGET),
        rational: cli.rational,
    };
    let default_eps = if cli.rational { "1/4" } else { "0.25" };
    let eps = args.eps.as_deref().unwrap_or(default_eps);
    let reports = match args.suite {
        Suite::Entropy => vec![verify::entropy_suite(args.level.unwrap_or(4), args.p, &opts)?],
        Suite::Generations => vec![verify::generations_suite(args.max_level.unwrap_or(4))?],
        Suite::Exits => vec![verify::exits_suite(args.max_level.unwrap_or(4))?],
        Suite::WeightClasses => vec![verify::weight_classes_suite(args.level.unwrap_or(4), eps, args.all_paths, &opts)?],
        Suite::CycleTrees => {
            let cycle = args.cycle.unwrap_or(7);
            let min_tree = args.min_tree.unwrap_or(cycle);
            let budget = cli.budget.unwrap_or(DEFAULT_BUDGET);
            vec![verify::cycle_trees_suite(
                cycle,
                min_tree,
                args.max_tree.unwrap_or(10),
                &VerifyOptions { budget, ..opts },
            )?]
        }
        Suite::Edgeiso => vec![verify::edgeiso_suite(args.max_level.unwrap_or(5), eps, &opts)?],
        Suite::Bound => {
            let eps = rational_to_f64(&parse_rational(eps)?)?;
            vec![verify::bound_suite(eps, args.max_level.unwrap_or(5), &opts)?]
        }
        Suite::Sp => match &args.input {
            Some(path) => {
                let (_, g) = load(path)?;
                let mut r = CheckReport::new("sp", json!({ "input": path }));
                if !is_series_parallel(&g) {
                    r.violations.push(json!({ "recognised": false }));
                }
                vec![r]
            }
            None => vec![verify::sp_suite(args.steps.unwrap_or(10), args.seed.unwrap_or(7), &Removal::None)?],
        },
        Suite::Bigon => vec![verify::bigon_suite(args.max_level.unwrap_or(4))?],
        Suite::All => verify::all_suites(&opts)?,
    };
    if args.suite == Suite::All {
        print_json(serde_json::to_value(&reports))?;
    } else {
        print_json(serde_json::to_value(&reports[0]))?;
    }
    Ok(if reports.iter().any(|r| !r.passed()) {
        EXIT_VIOLATION
    } else if reports.iter().any(|r| !r.certified) {
        EXIT_BUDGET
    } else {
        0
    })
}

fn mindist(cli: &Cli, args: &MindistArgs) -> Outcome<u8> {
    let (_, source) = load(&args.source)?;
    let (_, target) = load(&args.target)?;
    let r = min_distortion(
        &shortest_path_metric(&source)?,
        &shortest_path_metric(&target)?,
        cli.budget.unwrap_or(DEFAULT_BUDGET),
    )?;
    print_json(serde_json::to_value(&r))?;
    Ok(if r.certified { 0 } else { EXIT_BUDGET })
}

fn metric(cli: &Cli, args: &MetricArgs) -> Outcome<u8> {
    let (_, graph) = load(&args.input)?;
    let m = shortest_path_metric(&graph)?.with_labels(graph.labels().to_vec())?;
    write_or_print(args.out.as_deref(), &m.to_csv())?;
    if args.out.is_some() {
        let exact = if cli.rational && graph.exact_weights().is_some() {
            Some(ExactMetric::from_graph(&graph)?.is_metric())
        } else {
            None
        };
        print_json(Ok(json!({
            "points": m.n_points(),
            "diameter": m.diameter(),
            "is_metric": m.is_metric(tolerance(cli)?),
            "exact_is_metric": exact,
        })))?;
    }
    Ok(0)
}

fn separated(cli: &Cli, args: &SeparatedArgs) -> Outcome<u8> {
    let (_, graph) = load(&args.input)?;
    let m = shortest_path_metric(&graph)?;
    let mode = if args.greedy {
        SeparationMode::Greedy
    } else {
        SeparationMode::Exact {
            node_budget: cli.budget.unwrap_or(DEFAULT_NODE_BUDGET),
        }
    };
    let set = max_separated_set_tol(&m, args.delta, mode, tolerance(cli)?)?;
    print_json(serde_json::to_value(&set))?;
    Ok(0)
}
