use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

#[derive(Parser)]
#[command(
    name = "testspaces",
    version,
    about = "Finite metric test-spaces, their embeddings and exhaustive checks"
)]
pub struct Cli {
    /// Relative tolerance for floating-point comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Use exact rational weights where supported.
    #[arg(long, global = true)]
    pub rational: bool,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Node budget for exact searches.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a graph and write it as JSON.
    Gen(GenArgs),
    /// Embed a graph file and print the distortion report.
    Embed(EmbedArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Exact minimum distortion between two graph files.
    Mindist(MindistArgs),
    /// Shortest-path metric of a graph file as CSV.
    Metric(MetricArgs),
    /// Maximum delta-separated set of a graph file.
    Separated(SeparatedArgs),
}

#[derive(Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub family: GenFamily,
    /// Output file (standard output if omitted).
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Also write a Graphviz rendering.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum GenFamily {
    /// Binary tree with 0/1-word vertices.
    Tree {
        #[arg(long)]
        depth: u32,
    },
    /// Unit-weight diamond graph.
    Diamond {
        #[arg(long)]
        level: u32,
    },
    /// Weighted diamond keeping every level's edges.
    Wdiamond {
        #[arg(long)]
        level: u32,
        /// Decimal or p/q; with --rational the weights are exact.
        #[arg(long)]
        eps: String,
    },
    Cycle {
        #[arg(long)]
        n: usize,
    },
    /// Path with n edges.
    Path {
        #[arg(long)]
        n: usize,
    },
    /// Seeded series-parallel graph.
    Sp {
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Remove each edge with this probability (keeping the graph connected).
        #[arg(long, conflicts_with = "remove")]
        remove_prob: Option<f64>,
        /// Remove these edge indices.
        #[arg(long, value_delimiter = ',')]
        remove: Vec<usize>,
    },
    /// Ball in the Cayley graph of the infinite dihedral group.
    Dinfty {
        #[arg(long)]
        radius: u64,
    },
    /// Chain of blocks joined by paths between base points.
    Glue {
        /// Block spec such as tree:1, cycle:4@2 or wdiamond:2:0.25@0.
        #[arg(long = "block", required = true)]
        blocks: Vec<String>,
        /// Path lengths between consecutive blocks (smallest admissible if omitted).
        #[arg(long = "path-length")]
        path_lengths: Vec<u64>,
    },
    /// Cartesian product, whose path metric is the l1 sum.
    L1prod {
        /// Factor spec such as tree:2 or path:3.
        #[arg(long = "factor", required = true)]
        factors: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum EmbedMethod {
    Wdiamond,
    Glue,
    DinftyPhi,
}

#[derive(Args)]
pub struct EmbedArgs {
    pub method: EmbedMethod,
    /// Graph JSON produced by `gen`.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Embedding CSV output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Host norm used to measure the embedding.
    #[arg(long, default_value = "l2")]
    pub norm: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Entropy,
    Generations,
    Exits,
    /// Weight classes along shortest paths of weighted diamonds.
    #[value(name = "claim42")]
    WeightClasses,
    /// Cycles into every small tree.
    #[value(name = "rr")]
    CycleTrees,
    Edgeiso,
    Bound,
    Sp,
    Bigon,
    All,
}

#[derive(Args)]
pub struct VerifyArgs {
    pub suite: Suite,
    /// Diamond level (entropy, claim42).
    #[arg(long)]
    pub level: Option<u32>,
    /// Largest level (generations, exits, edgeiso, bound, bigon).
    #[arg(long)]
    pub max_level: Option<u32>,
    /// Separation exponent (entropy; all exponents if omitted).
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub eps: Option<String>,
    /// Cycle length (rr).
    #[arg(long)]
    pub cycle: Option<usize>,
    #[arg(long)]
    pub min_tree: Option<usize>,
    #[arg(long)]
    pub max_tree: Option<usize>,
    /// Enumerate every shortest path within this many paths (claim42).
    #[arg(long)]
    pub all_paths: Option<u64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Check this graph file instead of generating one (sp).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args)]
pub struct MindistArgs {
    pub source: PathBuf,
    pub target: PathBuf,
}

#[derive(Args)]
pub struct MetricArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SeparatedArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub delta: f64,
    /// Maximal rather than maximum set.
    #[arg(long)]
    pub greedy: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
