//! `simpqe` — quality estimation for automatic text simplification.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use simpqe_core::corpus::Aspect;

use commands::{CvArgs, PredictArgs};
use config::{ForestFlags, RunConfig};

#[derive(Parser)]
#[command(
    name = "simpqe",
    version,
    about = "Predict good/ok/bad quality labels for sentence simplifications",
    after_help = "Relative resource paths in the config file resolve against \
                  $SIMPQE_DATA_DIR when set, else against the config file's directory."
)]
struct Cli {
    /// Seed for all randomness (bootstrap, feature draws, fold shuffles) [default: 42]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on worker threads [default: all cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an n-gram language model from a plain-text corpus
    BuildLm {
        /// One sentence per line
        #[arg(long)]
        corpus: PathBuf,
        /// N-gram order
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Output model file
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a stem frequency table from a plain-text corpus
    BuildFreq {
        #[arg(long)]
        corpus: PathBuf,
        /// Short corpus name stored in the table header
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the nine features for every pair in a dataset
    Extract {
        #[arg(long)]
        config: PathBuf,
        /// Dataset TSV [default: resources.dataset from the config]
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Output TSV [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a random forest for one aspect
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// grammaticality, meaning or simplicity (overall is rule-derived)
        #[arg(long)]
        aspect: Aspect,
        /// Output model file; an .idf sidecar is written next to it
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        forest: ForestFlags,
    },
    /// Predict labels for a dataset with trained models
    Predict {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        aspect: Aspect,
        /// Model file (single-aspect prediction)
        #[arg(long)]
        model: Option<PathBuf>,
        /// Simplicity model (required for --aspect overall)
        #[arg(long)]
        simplicity_model: Option<PathBuf>,
        /// Meaning model (required for --aspect overall)
        #[arg(long)]
        meaning_model: Option<PathBuf>,
        /// Confidence threshold; below it the label falls back to ok [default: 0.5, or config]
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stratified k-fold cross-validation with a result table
    Cv {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        aspect: Aspect,
        /// Number of folds [default: 10, or config]
        #[arg(long)]
        k: Option<usize>,
        /// Threshold values, one report row each
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.6, 0.7])]
        taus: Vec<f64>,
        /// Emit the report as TSV instead of an aligned table
        #[arg(long)]
        tsv: bool,
        /// Also write the per-pair predictions dump (single tau only)
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Append per-fold rows to the report
        #[arg(long)]
        folds: bool,
        #[command(flatten)]
        forest: ForestFlags,
    },
    /// Score a predictions dump against gold labels
    Evaluate {
        /// Gold dataset TSV
        #[arg(long)]
        gold: PathBuf,
        /// Predictions TSV from `predict` or `cv --predictions`
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        tsv: bool,
    },
    /// Per-aspect label distribution of a dataset
    Stats {
        #[arg(long)]
        dataset: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    match cli.command {
        Command::BuildLm { corpus, order, out } => commands::build_lm(&corpus, order, &out),
        Command::BuildFreq { corpus, name, out } => commands::build_freq(&corpus, &name, &out),
        Command::Extract {
            config,
            dataset,
            out,
        } => {
            let cfg = RunConfig::load(&config)?;
            commands::extract(&cfg, dataset.as_deref(), out.as_deref())
        }
        Command::Train {
            config,
            dataset,
            aspect,
            out,
            forest,
        } => {
            let cfg = RunConfig::load(&config)?;
            let params = cfg.forest_params(&forest);
            let seed = cfg.seed(cli.seed);
            commands::train(&cfg, dataset.as_deref(), aspect, &out, &params, seed)
        }
        Command::Predict {
            config,
            dataset,
            aspect,
            model,
            simplicity_model,
            meaning_model,
            tau,
            out,
        } => {
            let cfg = RunConfig::load(&config)?;
            commands::predict(
                &cfg,
                &PredictArgs {
                    dataset: dataset.as_deref(),
                    aspect,
                    model: model.as_deref(),
                    simplicity_model: simplicity_model.as_deref(),
                    meaning_model: meaning_model.as_deref(),
                    tau,
                    out: out.as_deref(),
                },
            )
        }
        Command::Cv {
            config,
            dataset,
            aspect,
            k,
            taus,
            tsv,
            predictions,
            folds,
            forest,
        } => {
            let cfg = RunConfig::load(&config)?;
            let params = cfg.forest_params(&forest);
            let seed = cfg.seed(cli.seed);
            commands::cv(
                &cfg,
                &CvArgs {
                    dataset: dataset.as_deref(),
                    aspect,
                    k,
                    taus,
                    seed,
                    params,
                    tsv,
                    predictions: predictions.as_deref(),
                    show_folds: folds,
                },
            )
        }
        Command::Evaluate { gold, pred, tsv } => commands::evaluate(&gold, &pred, tsv),
        Command::Stats { dataset } => commands::stats(&dataset),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
