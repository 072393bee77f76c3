//! `mphe`: modified pointwise Hölder exponent pipelines.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Bad flags, config keys or combinations (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "mphe", version, about = "Modified Hölder exponents, precursor signals and the JMPHE/VIX backtest")]
pub struct Cli {
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Semi-norm curve C(beta) of one window, as `beta,C` CSV.
    Seminorm(SeminormArgs),
    /// MPHE series G(t) of a daily series, as `Date,G` CSV.
    Mphe(MpheArgs),
    /// MPHE, signal line and bottom-up crossing events of one series.
    Signals(SignalsArgs),
    /// Joint indicator H(t) over a panel of stocks, plus its events.
    Jmphe(JmpheArgs),
    /// JMPHE + VIX strategy backtest.
    Backtest(BacktestArgs),
    /// Score signals against crashes detected in an index.
    Evaluate(EvaluateArgs),
    /// Sample Weierstrass, generalized Weierstrass or random-walk series.
    Genfunc(GenfuncArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Daily CSV with a `Date` column.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Value column to read.
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct MpheParams {
    /// Target window size w.
    #[arg(long)]
    pub w: Option<usize>,
    /// Beta grid resolution n.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Reference exponent.
    #[arg(long)]
    pub alpha_ref: Option<f64>,
    #[arg(long)]
    pub block_size: Option<usize>,
    #[arg(long)]
    pub n_blocks: Option<usize>,
    /// `trailing` or `centered`.
    #[arg(long)]
    pub window_mode: Option<String>,
    /// Value used when the reference level is never reached.
    #[arg(long)]
    pub cap: Option<f64>,
    /// `fixed:<sessions>` (t_i = i/sessions) or `series-length` (t_i = i/N).
    #[arg(long)]
    pub time: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SignalParams {
    /// Signal-line height k.
    #[arg(long)]
    pub height: Option<f64>,
    /// Signal-line history h (default: multiplier * w).
    #[arg(long)]
    pub history: Option<usize>,
    #[arg(long)]
    pub history_multiplier: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PanelParams {
    /// Directory of per-stock CSV files.
    #[arg(long)]
    pub panel_dir: Option<PathBuf>,
    /// File listing one per-stock CSV path per line.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// `intersect` or `forward-fill`.
    #[arg(long)]
    pub align: Option<String>,
    /// EMA parameter lambda.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Explicit JMPHE signal line (default 1/(2k)).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Worker threads for per-stock MPHE.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SeminormArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// First row (0-based) of the window.
    #[arg(long)]
    pub start: Option<usize>,
    /// Window length.
    #[arg(long)]
    pub len: Option<usize>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Time convention, as for `mphe` (default `series-length`).
    #[arg(long)]
    pub time: Option<String>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct MpheArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: MpheParams,
    /// Divide G by its maximum.
    #[arg(long)]
    pub normalize: Option<bool>,
    /// Output path (`.json` for JSON, CSV otherwise).
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct SignalsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: MpheParams,
    #[command(flatten)]
    pub signal: SignalParams,
    /// `Date,G,sl` series output.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Events CSV output.
    #[arg(long)]
    pub events: PathBuf,
}

#[derive(Args, Debug)]
pub struct JmpheArgs {
    #[command(flatten)]
    pub panel: PanelParams,
    #[command(flatten)]
    pub params: MpheParams,
    #[command(flatten)]
    pub signal: SignalParams,
    /// `Date,H` output.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub events: PathBuf,
}

#[derive(Args, Debug)]
pub struct BacktestArgs {
    /// Prices of the traded instrument.
    #[arg(long)]
    pub prices: PathBuf,
    #[arg(long)]
    pub vix: PathBuf,
    /// Precomputed JMPHE events; otherwise computed from the panel flags.
    #[arg(long)]
    pub events: Option<PathBuf>,
    #[command(flatten)]
    pub panel: PanelParams,
    #[command(flatten)]
    pub params: MpheParams,
    #[command(flatten)]
    pub signal: SignalParams,
    #[arg(long)]
    pub vix_low: Option<f64>,
    #[arg(long)]
    pub vix_high: Option<f64>,
    /// Rows (or calendar days) after a JMPHE signal a VIX signal may follow.
    #[arg(long)]
    pub delay: Option<usize>,
    /// Count the delay in calendar days rather than trading rows.
    #[arg(long)]
    pub calendar_days: Option<bool>,
    /// Receives equity.csv, trades.csv and metrics.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Events CSV.
    #[arg(long)]
    pub signals: PathBuf,
    /// Index close series.
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub crash_threshold: Option<f64>,
    #[arg(long)]
    pub crash_days: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Summary JSON output.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenfuncArgs {
    /// `weierstrass`, `generalized` or `random-walk`.
    #[arg(long)]
    pub kind: Option<String>,
    /// Number of samples (weierstrass, random-walk).
    #[arg(long)]
    pub n: Option<usize>,
    /// Fractal dimension D of W.
    #[arg(long)]
    pub d: Option<f64>,
    /// Frequency base b of W.
    #[arg(long)]
    pub b: Option<f64>,
    /// Truncation of V.
    #[arg(long)]
    pub k_max: Option<u32>,
    /// First and last k of t_k = k/100 (generalized).
    #[arg(long)]
    pub k_first: Option<usize>,
    #[arg(long)]
    pub k_last: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Log-return volatility of the random walk.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<mphe_core::Error>() {
        Some(e) if e.is_invariant() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
