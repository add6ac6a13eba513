//! Command-line grammar: the `wardlens` subcommands and their flags.
//!
//! Flag values reuse the config-file grammars (window spans as
//! `-30m..-15m`, counting classes as comma-separated posture tokens) so a
//! value works identically in a config file and on the command line; flags
//! override config-file keys.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wardlens_report::Adjustment;

/// Batch analytics over posture-detection streams: cohort validation,
/// outcome association reports, detection-quality evaluation, and a
/// seeded synthetic-cohort generator.
#[derive(Debug, Parser)]
#[command(name = "wardlens", version, about)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores). Results
    /// are identical for every thread count.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// The subcommand to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Top-level subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse cohort files and print a validation report (exit 1 if any
    /// line is rejected).
    Validate(ValidateArgs),
    /// Build aligned windows, run the association analysis, and write
    /// report artifacts.
    Analyze(AnalyzeArgs),
    /// Score predicted detections against ground truth with
    /// patient-grouped folds.
    Deteval(DetevalArgs),
    /// Generate a synthetic cohort with planted occupancy effects.
    Synth(SynthArgs),
}

/// Inputs for `wardlens validate`.
#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Detection stream (one tab-separated frame record per line).
    pub detections: PathBuf,
    /// Pain events CSV (`patient_id,timestamp,dvprs`).
    pub pain: PathBuf,
    /// Acuity events CSV (`patient_id,interval_end,<flags>[,label]`).
    pub acuity: PathBuf,
    /// Delirium events CSV (`patient_id,timestamp,rass,cam_icu,gcs[,delirious]`).
    pub delirium: PathBuf,
}

/// Inputs and knobs for `wardlens analyze`.
#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Detection stream (one tab-separated frame record per line).
    pub detections: PathBuf,
    /// Pain events CSV.
    pub pain: PathBuf,
    /// Acuity events CSV.
    pub acuity: PathBuf,
    /// Delirium events CSV.
    pub delirium: PathBuf,
    /// Config file with `window.*` / `metrics.*` keys; flags below
    /// override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory receiving associations.txt, associations.csv, and
    /// histogram_bins.csv.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Pain window span relative to the event, e.g. `-30m..-15m`.
    #[arg(long, value_name = "SPAN", allow_hyphen_values = true)]
    pub window_pain: Option<String>,
    /// Delirium window span relative to the event, e.g. `-60m..-15m`.
    #[arg(long, value_name = "SPAN", allow_hyphen_values = true)]
    pub window_delirium: Option<String>,
    /// Acuity window span relative to the interval end, e.g. `-4h..0`.
    #[arg(long, value_name = "SPAN", allow_hyphen_values = true)]
    pub window_acuity: Option<String>,
    /// Minimum frames a window needs to be admitted.
    #[arg(long, value_name = "N")]
    pub min_frames: Option<usize>,
    /// Posture classes counted as people, comma-separated.
    #[arg(long, value_name = "CLASSES")]
    pub counting_classes: Option<String>,
    /// Multiple-comparison adjustment across each outcome's row family.
    #[arg(long, value_enum, default_value_t = AdjustFlag::None)]
    pub adjust: AdjustFlag,
    /// Which rendering is echoed to standard output.
    #[arg(long, value_enum, default_value_t = FormatFlag::Text)]
    pub format: FormatFlag,
}

/// Inputs for `wardlens deteval`.
#[derive(Debug, Args)]
pub struct DetevalArgs {
    /// Predicted detection stream.
    pub predictions: PathBuf,
    /// Ground-truth detection stream in the same format.
    pub ground_truth: PathBuf,
    /// Fold-assignment CSV (`fold,patient_id` header, one test-set
    /// membership per line). Mutually exclusive with --kfold/--seed.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["kfold", "seed"])]
    pub folds: Option<PathBuf>,
    /// Number of patient-grouped folds to draw.
    #[arg(long, value_name = "K", default_value_t = 5)]
    pub kfold: usize,
    /// Seed for the fold shuffle.
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving deteval.txt and deteval.csv.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Which rendering is echoed to standard output.
    #[arg(long, value_enum, default_value_t = FormatFlag::Text)]
    pub format: FormatFlag,
}

/// Inputs for `wardlens synth`.
#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator config file (`key = value` grammar).
    pub config: PathBuf,
    /// Master seed, overriding the config file's `seed` key.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Directory receiving detections.tsv, pain.csv, acuity.csv,
    /// delirium.csv, and ledger.csv.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

/// `--adjust` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdjustFlag {
    /// Report raw p-values only.
    None,
    /// Benjamini-Hochberg step-up false-discovery-rate control.
    Bh,
    /// Bonferroni family-wise control.
    Bonferroni,
}

impl From<AdjustFlag> for Adjustment {
    fn from(flag: AdjustFlag) -> Self {
        match flag {
            AdjustFlag::None => Adjustment::None,
            AdjustFlag::Bh => Adjustment::BenjaminiHochberg,
            AdjustFlag::Bonferroni => Adjustment::Bonferroni,
        }
    }
}

/// `--format` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatFlag {
    /// Echo the plain-text table.
    Text,
    /// Echo the long-format CSV.
    Csv,
}
