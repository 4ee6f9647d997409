use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "glotto", version, about = "Lexical distances, divergence dating and language geometry")]
pub struct Cli {
    /// Directory for output files (created if missing).
    #[arg(long, global = true, env = "GLOTTO_OUT_DIR")]
    pub out_dir: Option<PathBuf>,

    /// Chronology parameters as key=value lines (tau, d_max, k_var, reference_year).
    #[arg(long, global = true, env = "GLOTTO_CONFIG")]
    pub config: Option<PathBuf>,

    /// Suppress the report on standard output.
    #[arg(long, short, global = true, env = "GLOTTO_QUIET")]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise lexical distances from a word list.
    Dist(DistArgs),
    /// Separation times and the UPGMA tree from a distance matrix.
    Tree(TreeArgs),
    /// Euclidean embedding of a distance matrix.
    Embed(EmbedArgs),
    /// Breakup date from the radial variance of the embedding.
    Date(DateArgs),
    /// Evolve a random ancestral word list down a Newick tree.
    Simulate(SimulateArgs),
    /// Re-run a command from its manifest.json.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Word list: language TAB meaning-id TAB word.
    pub corpus: PathBuf,

    #[arg(long, env = "GLOTTO_M_CATALOG", default_value_t = glotto_core::lexicon::DEFAULT_M_CATALOG)]
    pub m_catalog: u32,

    /// Character policy: default, permissive or strict.
    #[arg(long, env = "GLOTTO_POLICY", default_value = "default")]
    pub policy: String,

    /// Minimum number of shared meanings per pair.
    #[arg(long, env = "GLOTTO_MIN_SHARED", default_value_t = 1)]
    pub min_shared: usize,

    /// Reference language for the distance-to-reference report (repeatable).
    #[arg(long = "reference", value_name = "TAG")]
    pub references: Vec<String>,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    #[arg(long, env = "GLOTTO_TAU")]
    pub tau: Option<f64>,

    #[arg(long, env = "GLOTTO_D_MAX")]
    pub d_max: Option<f64>,

    #[arg(long, env = "GLOTTO_K_VAR")]
    pub k_var: Option<f64>,

    #[arg(long, env = "GLOTTO_REFERENCE_YEAR", allow_negative_numbers = true)]
    pub reference_year: Option<i32>,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Distance matrix CSV as written by `dist`.
    pub matrix: PathBuf,

    /// Root age in years; rescales tau so the tree root sits there.
    #[arg(long, env = "GLOTTO_ANCHOR")]
    pub anchor: Option<f64>,

    /// Also write tree_groups.nwk with leaves annotated by a cut into K clades.
    #[arg(long, value_name = "K")]
    pub annotate: Option<usize>,

    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Distance matrix CSV as written by `dist`.
    pub matrix: PathBuf,

    /// Embedding dimension, 1..=N-1.
    #[arg(long, short = 'n', env = "GLOTTO_DIM", default_value_t = 3)]
    pub dim: usize,

    /// groups.csv from `tree`, used to color angles.svg.
    #[arg(long)]
    pub groups: Option<PathBuf>,

    /// Column of the groups file to use (defaults to the last one).
    #[arg(long, requires = "groups")]
    pub group_column: Option<String>,
}

#[derive(Debug, Args)]
pub struct DateArgs {
    /// Distance matrix CSV as written by `dist`.
    pub matrix: PathBuf,

    /// Embedding dimension for the radial variance (defaults to N-1).
    #[arg(long, short = 'n', env = "GLOTTO_DIM")]
    pub dim: Option<usize>,

    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Newick tree with branch lengths in years.
    pub tree: PathBuf,

    /// Per-lineage replacement rate per word per year.
    #[arg(long, env = "GLOTTO_RATE")]
    pub rate: f64,

    #[arg(long, env = "GLOTTO_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long, env = "GLOTTO_M_CATALOG", default_value_t = glotto_core::lexicon::DEFAULT_M_CATALOG)]
    pub m_catalog: u32,

    /// Word pairs sampled for the random-word baseline written to model.conf.
    #[arg(long, default_value_t = 100_000)]
    pub baseline_samples: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
