use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "banscope", version, about = "Shadow-ban population analysis: statistics, hypothesis tests, SI fitting, mock network and detector")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Master seed for every random stream.
    #[arg(long, global = true, env = "BANSCOPE_SEED", default_value_t = 2021)]
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, env = "BANSCOPE_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Directory receiving CSV/JSON outputs and run metadata.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Per-graph topology and ban statistics.
    Stats(StatsArgs),
    /// Exact binomial test of every graph against uniform random banning.
    H0Test(H0Args),
    /// Simulated ban rate over a (p0, beta) grid.
    FitH1(FitArgs),
    /// Picks beta on the fitted ridge by the neighbor-conditional rate.
    SelectBeta(SelectArgs),
    /// Per-graph likelihood under both hypotheses, binned.
    Likelihood(LikelihoodArgs),
    /// Decision tree on profile features.
    Features(FeaturesArgs),
    /// Synthetic topologies with planted bans.
    Synth(SynthArgs),
    /// Serves a scenario as a mock network until interrupted.
    ServeMock(ServeArgs),
    /// Runs the three ban tests against an endpoint.
    Detect(DetectArgs),
    /// Snowball-samples ego-graphs from an endpoint or a synthetic source.
    Sample(SampleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DatasetArgs {
    /// Dataset JSONL (optionally gzipped); `-` reads standard input.
    pub input: PathBuf,
    /// Graphs with fewer nodes are dropped before analysis.
    #[arg(long, default_value_t = 2)]
    pub min_nodes: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct H0Args {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Ban rate; defaults to the dataset's own estimate.
    #[arg(long)]
    pub mu: Option<f64>,
    /// How many of the least likely graphs to rank.
    #[arg(long, default_value_t = 5)]
    pub top: usize,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    pub p0_min: f64,
    #[arg(long, default_value_t = 0.025)]
    pub p0_max: f64,
    #[arg(long, default_value_t = 11)]
    pub p0_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 0.25)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 26)]
    pub beta_steps: usize,
    /// SI runs per graph and grid point.
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Degree used for the analytic column; defaults to the dataset's
    /// rounded mean degree.
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Ridge CSV from `fit-h1`; computed from the grid flags when absent.
    #[arg(long)]
    pub ridge: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct LikelihoodArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[arg(long, default_value_t = 0.015)]
    pub p0: f64,
    #[arg(long, default_value_t = 0.0955)]
    pub beta: f64,
    /// Ban rate for the uniform hypothesis; defaults to the dataset's estimate.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Descending bin edges from 1 to 0, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub bins: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-2)]
    pub likely_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub unlikely_max: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeaturesArg {
    All,
    Sqrt,
    Log2,
}

#[derive(Debug, Args, Serialize)]
pub struct FeaturesArgs {
    /// Dataset JSONL with per-node features; `-` reads standard input.
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, value_enum, default_value_t = MaxFeaturesArg::All)]
    pub max_features: MaxFeaturesArg,
    #[arg(long, default_value_t = 2)]
    pub min_samples_split: usize,
    #[arg(long, default_value_t = 1)]
    pub min_samples_leaf: usize,
    /// Keep the class imbalance instead of downsampling the majority.
    #[arg(long)]
    pub no_balance: bool,
    #[arg(long, default_value_t = 5)]
    pub permutation_repeats: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pub graphs: usize,
    /// Plant SI(p0, beta); requires --beta.
    #[arg(long, requires = "beta", conflicts_with = "uniform_mu")]
    pub p0: Option<f64>,
    #[arg(long, requires = "p0")]
    pub beta: Option<f64>,
    /// Plant independent bans with this probability instead.
    #[arg(long)]
    pub uniform_mu: Option<f64>,
    /// Reuse the topologies of an existing dataset instead of generating them.
    #[arg(long)]
    pub topology: Option<PathBuf>,
    /// Users in the generated interaction network.
    #[arg(long, default_value_t = 1_000_000)]
    pub users: u64,
    /// Attach toy profile features; banned users get media_count and
    /// friends_count scaled by 1 + this shift (0 = uninformative).
    #[arg(long)]
    pub feature_shift: Option<f64>,
    /// Output dataset, relative to --out-dir; `-` writes standard output.
    #[arg(long, default_value = "synthetic.jsonl")]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ServeArgs {
    /// Scenario JSONL, or a dataset JSONL with --from-dataset; `-` reads stdin.
    pub input: PathBuf,
    /// Treat the input as a dataset and plant a scenario from it.
    #[arg(long)]
    pub from_dataset: bool,
    /// Also save the planted scenario here.
    #[arg(long)]
    pub write_scenario: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// 0 picks a free port; the bound address is printed on stdout.
    #[arg(long, default_value_t = 0)]
    pub port: u16,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[arg(long)]
    pub endpoint: String,
    /// Screen names to test (repeatable, comma separated).
    #[arg(long = "user", value_delimiter = ',')]
    pub users: Vec<String>,
    /// File with one screen name per line.
    #[arg(long)]
    pub users_file: Option<PathBuf>,
    /// Test every account the endpoint lists (mock services only).
    #[arg(long)]
    pub all: bool,
    /// Only tweets from this date (YYYY-MM-DD or RFC 3339) count as activity.
    #[arg(long, default_value = "2019-01-01")]
    pub since: String,
    /// Recent tweets inspected by the ghost test.
    #[arg(long, default_value_t = 33)]
    pub sample: usize,
    /// Inspect up to 1000 recent tweets instead of --sample.
    #[arg(long)]
    pub full_scan: bool,
    #[arg(long, default_value_t = 10)]
    pub timeout_secs: u64,
    #[arg(long, default_value_t = 1)]
    pub retries: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Crawl a mock network through its timelines.
    #[arg(long, conflicts_with = "synthetic")]
    pub endpoint: Option<String>,
    /// Crawl the generated synthetic interaction network.
    #[arg(long)]
    pub synthetic: bool,
    /// Users in the synthetic network.
    #[arg(long, default_value_t = 1_000_000)]
    pub users: u64,
    /// Landmarks (repeatable, comma separated).
    #[arg(long = "landmark", value_delimiter = ',')]
    pub landmarks: Vec<String>,
    #[arg(long)]
    pub landmarks_file: Option<PathBuf>,
    /// Draw this many random landmarks (synthetic source only).
    #[arg(long)]
    pub random_landmarks: Option<usize>,
    #[arg(long, default_value_t = 33)]
    pub fanout: usize,
    #[arg(long, default_value_t = 2)]
    pub expand_depth: usize,
    /// Annotate sampled nodes with detected bans (endpoint only).
    #[arg(long, requires = "endpoint")]
    pub detect: bool,
    /// Output dataset, relative to --out-dir; `-` writes standard output.
    #[arg(long, default_value = "sample.jsonl")]
    pub output: PathBuf,
}
