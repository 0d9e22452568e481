//! Command-line flags. Every struct is echoed verbatim into its report.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "bundle-decomp", version, about = "Regular-pair decompositions, bundle partitions and bipartite packings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a random test graph.
    Generate(GenerateArgs),
    /// Certify or refute epsilon-regularity of a pair.
    CheckRegular(CheckRegularArgs),
    /// Degree cleanup of a regular pair into a bundle.
    ExtractBundle(ExtractBundleArgs),
    /// Split the edges of a balanced pair into regular pairs plus a sparse rest.
    EdgeDecompose(DecomposeArgs),
    /// Dice-roll vertex partition into bundles.
    VertexPartition(PartitionArgs),
    /// Vertex-disjoint copies of a bipartite pattern.
    Pack(PackArgs),
    /// Re-run every assertion on stored artifacts.
    Verify(VerifyArgs),
    /// Evaluate the theorem-scale bounds for given parameters.
    Params(ParamsArgs),
    /// Decompose, partition, verify and optionally pack from a JSON config.
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Regular,
    BipartiteDensity,
    PlantedBundle,
    PlantedDecomposition,
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: GraphKind,
    /// Vertices (regular) or vertices per side (planted-decomposition).
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree for regular graphs.
    #[arg(long)]
    pub r: Option<usize>,
    /// Side size for bipartite kinds.
    #[arg(long)]
    pub m: Option<usize>,
    /// Edge probability for bipartite-density.
    #[arg(long)]
    pub p: Option<f64>,
    /// Density of the planted bundle or blocks.
    #[arg(long)]
    pub d: Option<f64>,
    /// Allowed degree deviation of a planted bundle.
    #[arg(long, default_value_t = 1.0)]
    pub slack: f64,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Graph file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityMode {
    Brute,
    Kr,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckRegularArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "kr")]
    pub mode: RegularityMode,
    #[arg(long)]
    pub epsilon: f64,
    /// Codegree parameter; epsilon^5/16 when absent.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Largest part size the enumeration accepts.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractBundleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeFlags {
    #[arg(long)]
    pub max_pairs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub m_floor: Option<usize>,
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub d: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub decompose: DecomposeFlags,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PartitionArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub d: f64,
    /// Reference degree; the mean degree of the pair when absent.
    #[arg(long)]
    pub r: Option<f64>,
    /// High-degree threshold of the exceptional report; d^(2/3) when absent.
    #[arg(long)]
    pub psi: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub decompose: DecomposeFlags,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PackMode {
    Balanced,
    Unbalanced,
    Subdivide,
}

#[derive(Args, Debug, Serialize, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PackFlags {
    /// Degree scale of the host; mean degree when absent.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub drc_trials: Option<usize>,
    #[arg(long)]
    pub bt: Option<usize>,
    #[arg(long)]
    pub repair: Option<usize>,
    #[arg(long)]
    pub embed_budget: Option<usize>,
    /// Vacancy floor of the codegree-chain phase.
    #[arg(long)]
    pub floor: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct PackArgs {
    /// Host graph, edge-list format.
    #[arg(long)]
    pub graph: PathBuf,
    /// Pattern graph, edge-list format.
    #[arg(long, conflicts_with = "pattern_name")]
    pub pattern: Option<PathBuf>,
    /// Built-in pattern: K2, P<k>, C<k>, K<k>, K<a>,<b>, S<k>.
    #[arg(long)]
    pub pattern_name: Option<String>,
    #[arg(long, value_enum, default_value = "balanced")]
    pub mode: PackMode,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub d: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub pack: PackFlags,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("artifact").required(true)))]
pub struct VerifyArgs {
    /// The graph the artifact was computed on (pair file for partitions and
    /// decompositions, edge list for packings).
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, group = "artifact")]
    pub partition: Option<PathBuf>,
    #[arg(long, group = "artifact")]
    pub decomposition: Option<PathBuf>,
    #[arg(long, group = "artifact")]
    pub packing: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ParamsArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub d: f64,
    /// Vertices per side.
    #[arg(long)]
    pub n: f64,
    /// Host density.
    #[arg(long, default_value_t = 1.0)]
    pub d_g: f64,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
