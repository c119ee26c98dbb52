//! The `sasvkit` command line.
//!
//! Exit codes: 0 success, 2 usage or I/O failure, 3 input data violating a
//! format or metric contract, 4 numerical failure.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::io::ReportFormat;
use crate::metrics::GroupBy;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "sasvkit",
    version,
    about = "Audit, calibrate, fuse and evaluate spoofing-aware speaker verification scores"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Balance counts and duration, onset-delay and quality histograms.
    Audit(AuditArgs),
    /// EER, minDCF, actDCF and Cllr of CM scores, optionally broken down.
    EvalCm(EvalCmArgs),
    /// min a-DCF, min t-DCF and t-EER of SASV trials.
    EvalSasv(EvalSasvArgs),
    /// Fit or apply a score-to-LLR calibration model.
    #[command(subcommand)]
    Calibrate(CalibrateCommand),
    /// Fuse aligned score files.
    #[command(subcommand)]
    Fuse(FuseCommand),
    /// Grid-search the LSE fusion weight.
    Sweep(SweepArgs),
    /// Write seeded Gaussian fixture files.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Report format: json or csv.
    #[arg(long, default_value = "json", value_parser = parse_format)]
    pub format: ReportFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Cost model selection: a built-in profile name, a JSON file holding one
/// cost model or a profile set (`file.json#name` picks a member), plus
/// per-field overrides.
#[derive(Debug, Clone, Args)]
pub struct CostArgs {
    #[arg(long, default_value = "uniform")]
    pub profile: String,
    #[arg(long)]
    pub c_miss: Option<f64>,
    #[arg(long)]
    pub c_fa: Option<f64>,
    #[arg(long)]
    pub c_fa_spoof: Option<f64>,
    #[arg(long)]
    pub pi_target: Option<f64>,
    #[arg(long)]
    pub pi_nontarget: Option<f64>,
    #[arg(long)]
    pub pi_spoof: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    /// Metadata file (tab-separated utt_id, gender, codec, attack, label).
    #[arg(long)]
    pub meta: PathBuf,
    /// Directory holding `<utt_id>.wav` files.
    #[arg(long)]
    pub audio: Option<PathBuf>,
    /// Per-utterance quality scores in score-file format.
    #[arg(long)]
    pub quality: Option<PathBuf>,
    /// VAD threshold relative to the loudest frame, in dB.
    #[arg(long, default_value_t = -35.0, allow_hyphen_values = true)]
    pub vad_threshold_db: f64,
    /// Consecutive active frames that mark speech onset.
    #[arg(long, default_value_t = 5)]
    pub hangover: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalCmArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub meta: PathBuf,
    /// Breakdown grouping: attack, codec or attack,codec.
    #[arg(long, value_parser = parse_group_by)]
    pub by: Option<GroupBy>,
    /// Breakdown metric: eer, min_dcf, act_dcf or cllr.
    #[arg(long, default_value = "eer")]
    pub metric: String,
    /// Breakdown output file; standard output when absent.
    #[arg(long)]
    pub breakdown: Option<PathBuf>,
    #[command(flatten)]
    pub cost: CostArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalSasvArgs {
    /// Trial file (enroll, test, class[, asv[, cm]]). With both score
    /// columns the LLRs are LSE-fused; a single column is the fused score.
    #[arg(long)]
    pub trials: PathBuf,
    /// ASV weight of the LSE fusion.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Coarse ASV-threshold grid size of the t-EER search.
    #[arg(long, default_value_t = 101)]
    pub teer_grid: usize,
    /// Metadata of test utterances, needed by --by.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, value_parser = parse_group_by)]
    pub by: Option<GroupBy>,
    #[arg(long)]
    pub breakdown: Option<PathBuf>,
    #[command(flatten)]
    pub cost: CostArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Score source for calibration: a CM score file joined with metadata, or
/// one column of a trial file.
#[derive(Debug, Clone, Args)]
pub struct ScoreSource {
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["scores", "meta"])]
    pub trials: Option<PathBuf>,
    /// Trial-file column: asv (target vs nontarget) or cm (bona fide vs spoof).
    #[arg(long, default_value = "cm")]
    pub column: String,
}

#[derive(Debug, Subcommand)]
pub enum CalibrateCommand {
    Fit(FitArgs),
    Apply(ApplyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub source: ScoreSource,
    /// Model kind: logreg or beta.
    #[arg(long, default_value = "logreg")]
    pub kind: String,
    /// Beta score scaling: cosine_affine, logistic or identity.
    #[arg(long, default_value = "cosine_affine")]
    pub scaling: String,
    /// Training prior: a probability or `empirical`.
    #[arg(long, default_value = "0.5")]
    pub prior: String,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long, conflicts_with = "scores")]
    pub trials: Option<PathBuf>,
    #[arg(long, default_value = "cm")]
    pub column: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FuseCommand {
    /// Weighted sum of aligned score files.
    Linear(LinearArgs),
    /// Weighted negative-LogSumExp of a CM and an ASV LLR file, or of the
    /// paired columns of a trial file.
    Lse(LseArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LinearArgs {
    /// Score files, repeated.
    #[arg(long, required = true)]
    pub scores: Vec<PathBuf>,
    /// Comma-separated weights; equal weights summing to one when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LseArgs {
    #[arg(long, requires = "asv")]
    pub cm: Option<PathBuf>,
    #[arg(long, requires = "cm")]
    pub asv: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["cm", "asv"])]
    pub trials: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Trial file with paired calibrated LLRs.
    #[arg(long)]
    pub trials: PathBuf,
    /// Weight grid `start:stop:step`, or a single value.
    #[arg(long, default_value = "0:1:0.05")]
    pub grid: String,
    #[command(flatten)]
    pub cost: CostArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per class.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mu_pos: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub mu_neg: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma: f64,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_group_by(s: &str) -> Result<GroupBy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::File { .. } | Error::Io(_) | Error::UnsupportedFormat { .. } => EXIT_USAGE,
        Error::NonConvergence { .. } | Error::NoConcurrentPoint => EXIT_NUMERICAL,
        _ => EXIT_DATA,
    }
}

/// Runs the command line (`args[0]` is the program name) and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("sasvkit: {e}");
            exit_code(&e)
        }
    }
}
