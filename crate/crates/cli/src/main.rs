mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use behavesim::cluster::Linkage;
use behavesim::search::SearchMode;
use behavesim::trajsim::Measure;

/// Behavioral similarity of algorithms from their problem-solving trajectories.
#[derive(Debug, Parser)]
#[command(name = "behavesim", version)]
pub struct Cli {
    /// JSON config: a fingerprint set for compare/cluster, a search config for search.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Parallel evaluation threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every benchmark pair and write per-pair values and per-type means.
    DatasetEval {
        /// Similarity measures to report.
        #[arg(long, value_delimiter = ',', default_values = ["behave", "ngram", "tree-edit"])]
        measures: Vec<PairMeasure>,
        #[arg(long, value_enum, default_value_t = TrajMeasure::Dtw)]
        measure: TrajMeasure,
    },
    /// Print the similarity of two algorithms (zoo ids or S-expressions) as JSON.
    Compare {
        a: String,
        b: String,
        #[arg(long, value_enum)]
        measure: Option<TrajMeasure>,
    },
    /// Hierarchically cluster zoo algorithms or the members of a search report.
    Cluster {
        /// Comma-separated zoo ids.
        #[arg(long, value_delimiter = ',', conflicts_with = "snapshot", required_unless_present = "snapshot")]
        algos: Vec<String>,
        /// Search report JSON whose members are clustered.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ClusterMeasure::Dtw)]
        measure: ClusterMeasure,
        #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
        linkage: LinkageArg,
    },
    /// Run a heuristic search.
    Search {
        #[arg(long, value_enum, default_value_t = ModeArg::Funsearch)]
        mode: ModeArg,
    },
    /// Record one trajectory as JSONL.
    Traj {
        algo: String,
        /// Fixture instance id.
        #[arg(long, required_unless_present = "instance_file")]
        instance: Option<String>,
        /// Instance JSON file, instead of a fixture.
        #[arg(long, conflicts_with = "instance")]
        instance_file: Option<PathBuf>,
        #[arg(long)]
        start: String,
    },
    /// Print the algorithm registry and benchmark pairs as JSON.
    Zoo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairMeasure {
    Behave,
    Ngram,
    TreeEdit,
}

impl PairMeasure {
    pub fn name(self) -> &'static str {
        match self {
            PairMeasure::Behave => "behave",
            PairMeasure::Ngram => "ngram",
            PairMeasure::TreeEdit => "tree_edit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrajMeasure {
    Dtw,
    Mean,
    Erp,
    Cosine,
}

impl TrajMeasure {
    pub fn measure(self) -> Measure {
        match self {
            TrajMeasure::Dtw => Measure::Dtw,
            TrajMeasure::Mean => Measure::MeanPairwise,
            TrajMeasure::Erp => Measure::erp(),
            TrajMeasure::Cosine => Measure::SegmentCosine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClusterMeasure {
    Dtw,
    Mean,
    Erp,
    Cosine,
    /// Token n-gram similarity of the algorithm text.
    Ngram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LinkageArg {
    Average,
    Complete,
    Single,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Self {
        match l {
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Single => Linkage::Single,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Funsearch,
    Eoh,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Funsearch => SearchMode::Funsearch,
            ModeArg::Eoh => SearchMode::Eoh,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
