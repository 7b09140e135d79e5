mod cmd;
mod input;
mod num;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gkw::series::SeriesControl;

#[derive(Parser, Debug)]
#[command(name = "gkw", version, about = "Generalized Kumaraswamy distribution: evaluation, properties and model fitting")]
struct Cli {
    /// Maximum number of terms in any series before falling back.
    #[arg(long, global = true, default_value_t = 400)]
    series_max_terms: usize,
    /// Tail tolerance for series truncation.
    #[arg(long, global = true, default_value_t = 1e-10)]
    series_tol: f64,
    /// Suppress notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate pdf, cdf or quantile at given points.
    Eval(EvalArgs),
    /// Draw a random sample to CSV.
    Sample(SampleArgs),
    /// Moments, L-moments, entropy and mean deviations as JSON.
    Props(PropsArgs),
    /// Fit the model family to a data file.
    Fit(FitArgs),
    /// Likelihood ratio test between two models of a fit report.
    Lr(LrArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum What {
    Pdf,
    Cdf,
    Quantile,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// alpha,beta,gamma,delta,lambda
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    /// Comma-separated evaluation points.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    #[arg(long, value_enum, default_value_t = What::Pdf)]
    pub what: What,
    /// Emit JSON instead of a tab-separated table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PropsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    /// Raw moments of order 1..=k (central moments and cumulants up to 6).
    #[arg(long)]
    pub moments: Option<usize>,
    /// L-moments of order 1..=4.
    #[arg(long)]
    pub lmoments: bool,
    /// Renyi entropy of order rho.
    #[arg(long)]
    pub entropy: Option<f64>,
    /// Mean deviations about the mean and the median.
    #[arg(long)]
    pub deviations: bool,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Single-column CSV of proportions.
    #[arg(long)]
    pub data: PathBuf,
    /// Models to fit (gkw, bkw, kwkw/kkw, ekw, mc/gb1, beta, bp, kw).
    #[arg(long, value_delimiter = ',', default_value = "gkw,bkw,kwkw,ekw,mc,beta,bp,kw")]
    pub models: Vec<String>,
    /// Recorded in the report.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Map x to (x(n-1) + 1/2)/n before fitting.
    #[arg(long)]
    pub shrink: bool,
    /// Data are percentages; divide by 100.
    #[arg(long)]
    pub percent: bool,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Histogram and fitted densities on a 512-bin grid, as TSV.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LrArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub null: String,
    #[arg(long)]
    pub alt: String,
}

/// Context shared by every command.
pub struct Ctx {
    pub series: SeriesControl,
    pub quiet: bool,
}

impl Ctx {
    pub fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("note: {}", msg.as_ref());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let series = match SeriesControl::new(cli.series_max_terms, cli.series_tol) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let ctx = Ctx { series, quiet: cli.quiet };
    let out = match &cli.command {
        Command::Eval(a) => cmd::eval(&ctx, a),
        Command::Sample(a) => cmd::sample(&ctx, a),
        Command::Props(a) => cmd::props(&ctx, a),
        Command::Fit(a) => cmd::fit(&ctx, a),
        Command::Lr(a) => cmd::lr(&ctx, a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
