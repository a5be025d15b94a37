//! `horocycle`: batch experiments on orbit averages, majorants and
//! exponential sums.
//!
//! Exit codes: 0 success, 1 configuration error, 2 property suite failure,
//! 3 numerical failure.

mod commands;
mod config;
mod output;
mod suites;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "horocycle", version, about = "Orbit averages and Diophantine majorants on the affine lattice space")]
struct Cli {
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Coset,
    Mollified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Arith,
    Majorant,
    Fourier,
    Dual,
    Closed,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Majorants b, b̃ and the lattice quantities y_g, b_g on a y-grid.
    Majorant {
        #[arg(long, default_value = "0,0")]
        xi: String,
        #[arg(long = "L", default_value_t = 1.0)]
        l: f64,
        /// Exponent range kmin..kmax; y = base^(-k).
        #[arg(long, default_value = "2..14")]
        ygrid: String,
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
    /// Closed-lift averages with discrepancy reports on a y-grid.
    Average {
        #[arg(long, default_value = "0,0")]
        xi: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value = "2..8")]
        ygrid: String,
        #[arg(long, default_value_t = 2.0)]
        base: f64,
        /// Test function spec file (flat key=value).
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
    },
    /// General orbit averages T⁻¹∫₀ᵀ f(Γ(1,ξ)MU^t)dt on a T-grid.
    Orbit {
        #[arg(long, default_value = "0,0")]
        xi: String,
        /// Entries a,b,c,d of M.
        #[arg(long, default_value = "1,0,0,1", allow_hyphen_values = true)]
        matrix: String,
        /// Comma separated list of T values.
        #[arg(long = "T", default_value = "10,100,1000")]
        t: String,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Kloosterman sum S(n,m;c) and its Weil bound.
    Kloosterman {
        #[arg(long)]
        c: u64,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
    },
    /// Closed-horocycle approximation and interval partition for (ξ, M, T).
    Partition {
        #[arg(long, default_value = "0,0")]
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        #[arg(long = "T", default_value = "1000")]
        t: String,
        /// Cap on measured constants.
        #[arg(long, default_value_t = 100.0)]
        cap: f64,
        /// Also compare the plan-based reassembly with the direct average.
        #[arg(long)]
        reassemble: bool,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run a property suite; exits 2 with a failure list if any check fails.
    Check {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Monte Carlo over ξ of the decay b_g(T) ≤ C·T^(−α).
    GenericDecay {
        #[arg(long, default_value = "1,0,0,1", allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 0.4)]
        alpha: f64,
        #[arg(long = "C", default_value_t = 100.0)]
        c: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1e6)]
        tmax: f64,
        /// Grid points per decade of T, starting at T = 10.
        #[arg(long, default_value_t = 2)]
        per_decade: usize,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Suite(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Suite(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Suite(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<horocycle::Error> for CliError {
    fn from(e: horocycle::Error) -> Self {
        match e {
            horocycle::Error::Quadrature(_) | horocycle::Error::NoCandidate(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

/// Rendered output plus a deferred failure that is reported after writing.
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // A reader that closed early (`| head`) is not an error.
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Config(format!("cannot write output: {e}"))),
            _ => Ok(()),
        },
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let fmt = cli.format;
    let outcome = match cli.cmd {
        Command::Majorant { xi, l, ygrid, base } => commands::majorant(&xi, l, &ygrid, base, fmt)?,
        Command::Average { xi, alpha, beta, ygrid, base, spec, tol, eps, method, delta } => {
            commands::average(commands::AverageArgs { xi, alpha, beta, ygrid, base, spec, tol, eps, method, delta }, fmt)?
        }
        Command::Orbit { xi, matrix, t, spec, tol, eps } => commands::orbit(&xi, &matrix, &t, spec, tol, eps, fmt)?,
        Command::Kloosterman { c, n, m } => commands::kloosterman(c, n, m, fmt)?,
        Command::Partition { xi, matrix, t, cap, reassemble, spec, tol } => {
            commands::partition(&xi, matrix.as_deref(), &t, cap, reassemble, spec, tol, cli.seed, fmt)?
        }
        Command::Check { suite } => suites::check(suite, cli.seed)?,
        Command::GenericDecay { matrix, alpha, c, samples, tmax, per_decade } => {
            commands::generic_decay(&matrix, alpha, c, samples, tmax, per_decade, cli.seed, fmt)?
        }
    };
    write_output(&cli.out, &outcome.text)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let args = match config::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
