mod commands;
mod export;
mod validate;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use valence_core::{Cx, Error};

#[derive(Parser, Debug)]
#[command(name = "valence", version, about = "Critical sets, caustics and pre-image counts of harmonic mappings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Catalog key (mpw, log-example, wilmshurst:N, power:N:M, nexp, double-caustic) or a JSON map file.
    #[arg(long, global = true, default_value = "mpw")]
    pub map: String,
    /// Target value as "re,im".
    #[arg(long, global = true, value_parser = parse_cx, allow_hyphen_values = true)]
    pub eta: Option<Cx>,
    /// Output directory for artifact files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative residual tolerance of the Newton solver.
    #[arg(long, global = true, value_parser = parse_positive)]
    pub tol: Option<f64>,
    /// Initial seed grid per side of the Newton solver.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Restricts written artifacts to one format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl RunConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.format.is_none_or(|g| g == f)
    }

    pub fn eta(&self) -> Result<Cx, Failure> {
        self.eta.ok_or_else(|| Failure::Usage("--eta is required".into()))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical curves, caustics, index table and non-degeneracy report.
    Analyze,
    /// Pre-image count of eta by the winding formula.
    Count,
    /// Caustic tiles with their pre-image counts.
    Tiles,
    /// All pre-images of eta by harmonic Newton.
    Solve,
    /// Counts along the segment from --eta to --to.
    Scan {
        #[arg(long, value_parser = parse_cx, allow_hyphen_values = true)]
        to: Cx,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Runs the invariant checks and reports one line per check.
    Validate {
        /// Random off-caustic targets per map.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Validates every catalog map instead of --map.
        #[arg(long)]
        all: bool,
        /// Starves the Newton solver so that its count disagrees.
        #[arg(long)]
        inject_fault: bool,
    },
}

/// Failure classes, mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or map specification.
    Usage(String),
    /// Refused or failed computation.
    Numeric(Error),
    Io(std::io::Error),
    /// Validation ran but some check failed.
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_) | Error::DegenerateMap(_) => Failure::Usage(e.to_string()),
            e => Failure::Numeric(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn parse_cx(s: &str) -> Result<Cx, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected \"re,im\", got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let z = Cx::new(p(re)?, p(im)?);
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err("eta must be finite".into())
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.config;
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Analyze => commands::analyze(&cfg),
        Command::Count => commands::count(&cfg),
        Command::Tiles => commands::tiles(&cfg),
        Command::Solve => commands::solve(&cfg),
        Command::Scan { to, steps } => commands::scan(&cfg, to, steps),
        Command::Validate { samples, all, inject_fault } => validate::run(&cfg, samples, all, inject_fault),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(n)) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}
