//! `radix` — continued radicals and power forms from the command line:
//! evaluation, gap-bound tables, certified limits, convergence diagnostics.

mod output;
mod run;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit code for malformed input (expressions, JSON specs, flags).
pub const EXIT_PARSE: u8 = 2;
/// Exit code for evaluation failures.
pub const EXIT_EVAL: u8 = 3;
/// Exit code for missing certification when it was demanded.
pub const EXIT_NOT_CERTIFIED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "radix",
    about = "Evaluate right continued radicals and power forms with certified error bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// JSON spec file: {"kind":"radical"|"power","a":"<expr>",...}
    #[arg(long, value_name = "FILE", conflicts_with_all = ["builtin", "a"])]
    pub spec: Option<std::path::PathBuf>,

    /// Built-in spec name (golden, sqrt2plus, constant(a,b,r), ex-nested-n,
    /// ex-weighted-n, ramanujan)
    #[arg(long, value_name = "NAME", conflicts_with = "a")]
    pub builtin: Option<String>,

    /// Radicand sequence a_n as an expression in n
    #[arg(long, value_name = "EXPR")]
    pub a: Option<String>,

    /// Weight sequence b_n (integer-root specs only)
    #[arg(long, value_name = "EXPR", requires = "a")]
    pub b: Option<String>,

    /// Root sequence r_n (defaults to 2 when neither --r nor --p is given)
    #[arg(long, value_name = "EXPR", requires = "a", conflicts_with = "p")]
    pub r: Option<String>,

    /// Exponent sequence p_n; selects a power form
    #[arg(long, value_name = "EXPR", requires = "a")]
    pub p: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Working precision in bits (default: $RADIX_PRECISION_BITS or 128)
    #[arg(long, value_name = "BITS")]
    pub precision: Option<usize>,

    #[arg(long, value_enum, default_value = "plain")]
    pub format: Format,

    /// Exact rational added to displayed approximant values
    #[arg(long, value_name = "RATIONAL")]
    pub offset: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the depth-n approximant
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        /// Truncation depth
        #[arg(short = 'n', long = "depth", value_name = "N")]
        n: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Emit a table of true gaps and theorem-tagged gap bounds
    Gaps {
        #[command(flatten)]
        spec: SpecArgs,
        /// Largest gap index in the table
        #[arg(long, value_name = "N", default_value_t = 10)]
        n_max: u64,
        /// Comma-separated methods (identity, herschfeld_general, polya_szego,
        /// weighted_general, weighted_ps, power_form, power_form_ps);
        /// defaults to everything applicable
        #[arg(long, value_name = "LIST")]
        methods: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Estimate the limit with a certified truncation bound
    Limit {
        #[command(flatten)]
        spec: SpecArgs,
        /// Target truncation tolerance
        #[arg(long, value_name = "TOL")]
        tol: f64,
        #[arg(long, value_name = "N", default_value_t = 64)]
        n_max: u64,
        /// Tail strategy: geometric, series-s or summed
        #[arg(long, value_name = "NAME", default_value = "geometric")]
        strategy: String,
        /// Gap-bound window per certification attempt
        #[arg(long, value_name = "K", default_value_t = 24)]
        window: u64,
        /// Exit with status 4 unless the tail bound certifies
        #[arg(long)]
        require_certified: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Finite-horizon convergence diagnostics
    Diagnose {
        #[command(flatten)]
        spec: SpecArgs,
        /// Number of terms to inspect
        #[arg(long, value_name = "N", default_value_t = 32)]
        horizon: u64,
        /// Criterion: herschfeld, polya-szego or auto
        #[arg(long, value_name = "NAME", default_value = "auto")]
        criterion: String,
        /// Relative flatness threshold for stabilization checks
        #[arg(long, value_name = "T", default_value_t = 1e-3)]
        flatness_threshold: f64,
        /// Fraction of the horizon used as the stabilization window
        #[arg(long, value_name = "F", default_value_t = 0.25)]
        window_frac: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// An error plus the process exit code it maps to.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }
}

impl From<radix_core::Error> for CliError {
    fn from(e: radix_core::Error) -> CliError {
        CliError {
            code: if e.is_parse_error() { EXIT_PARSE } else { EXIT_EVAL },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Eval { spec, n, out } => run::cmd_eval(&spec, n, &out),
        Cmd::Gaps {
            spec,
            n_max,
            methods,
            out,
        } => run::cmd_gaps(&spec, n_max, methods.as_deref(), &out),
        Cmd::Limit {
            spec,
            tol,
            n_max,
            strategy,
            window,
            require_certified,
            out,
        } => run::cmd_limit(&spec, tol, n_max, &strategy, window, require_certified, &out),
        Cmd::Diagnose {
            spec,
            horizon,
            criterion,
            flatness_threshold,
            window_frac,
            out,
        } => run::cmd_diagnose(&spec, horizon, &criterion, flatness_threshold, window_frac, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radix: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
