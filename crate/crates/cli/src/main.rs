//! `kronecker`: exact eigenvalue counts of the adiabatic Laplacian on the
//! Kronecker-foliated 2-torus, their asymptotics, heat traces and continued
//! fractions, printed as CSV or JSON tables.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 resource limit,
//! 4 precision exhausted, 1 internal error.

mod commands;
mod sweep;
mod table;

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kronecker_core::Error as CoreError;

use commands::{Globals, LeafOutput};
use sweep::{HValues, Output, SweepSpec};
use table::{Format, Table};

/// Default `--max-strips`: about a second of counting per row.
const DEFAULT_MAX_STRIPS: u64 = 1_000_000_000;

/// A failure with its process exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn resource(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::InvalidSlope(_)
            | CoreError::InvalidArgument(_)
            | CoreError::Divergent { .. }
            | CoreError::RationalSlope => 2,
            CoreError::Overflow(_) | CoreError::InstanceTooLarge(_) | CoreError::TooManyEigenvalues { .. } => 3,
            CoreError::PrecisionExhausted { .. } | CoreError::QuadratureFailed { .. } => 4,
            CoreError::BeyondCap { .. } | CoreError::Unserializable(_) => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::internal(format!("cannot write output: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "kronecker", version, about = "Spectral counts for the adiabatic Laplacian on a Kronecker-foliated torus")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Read energies as μ = λ/4π² instead of λ.
    #[arg(long, global = true)]
    reduced: bool,

    /// Tie tolerance: modes with |λ_kl − λ| ≤ tol are reported as near_boundary.
    #[arg(long, global = true, value_name = "REAL")]
    tol: Option<f64>,

    /// Accuracy target for heat-trace truncation and Weyl quadrature.
    #[arg(long, global = true, value_name = "REAL")]
    eps: Option<f64>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Refuse counts that would visit more strips than this (exit 3).
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_MAX_STRIPS)]
    max_strips: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact N_h(λ) with the closed-form and Weyl leading terms.
    Count {
        #[arg(allow_hyphen_values = true)]
        slope: String,
        h: String,
        #[arg(allow_hyphen_values = true)]
        lambda: String,
        /// Integer arithmetic; needs --reduced, a rational slope and rational h and μ.
        #[arg(long)]
        exact_arith: bool,
    },
    /// Closed-form leading term of N_h(λ).
    Asym {
        #[arg(allow_hyphen_values = true)]
        slope: String,
        h: String,
        #[arg(allow_hyphen_values = true)]
        lambda: String,
    },
    /// Weyl convolution of the leafwise distribution function.
    Weyl {
        #[arg(allow_hyphen_values = true)]
        slope: String,
        h: String,
        #[arg(allow_hyphen_values = true)]
        lambda: String,
        /// Codimension of the foliation (1 for the torus).
        #[arg(long, default_value_t = 1)]
        q: u32,
    },
    /// Leafwise distribution function N_F sampled up to λ.
    Leafwise {
        #[arg(allow_hyphen_values = true)]
        slope: String,
        #[arg(allow_hyphen_values = true)]
        lambda: String,
        /// Number of equally spaced sample energies.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Print the distribution function itself as JSON.
        #[arg(long)]
        distribution: bool,
    },
    /// Heat trace by the spectral and the image sum.
    Heat {
        #[arg(allow_hyphen_values = true)]
        slope: String,
        h: String,
        t: String,
    },
    /// Report rows over a set of h values, sorted by h descending.
    Sweep {
        #[arg(allow_hyphen_values = true)]
        slope: Option<String>,
        #[arg(allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Explicit h values.
        #[arg(long = "h", value_delimiter = ',', value_name = "H,...", conflicts_with = "grid")]
        h_values: Vec<f64>,
        /// Geometric grid from START down to END.
        #[arg(long, num_args = 3, value_names = ["START", "END", "POINTS"])]
        grid: Option<Vec<String>>,
        /// Columns to compute.
        #[arg(long, value_enum, value_delimiter = ',')]
        outputs: Vec<Output>,
        /// JSON sweep specification instead of the arguments above.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["slope", "lambda", "h_values", "grid", "outputs"])]
        config: Option<PathBuf>,
    },
    /// Continued fraction with convergents; TERMS is a count or '-' for all.
    Cf {
        #[arg(allow_hyphen_values = true)]
        slope: String,
        #[arg(allow_hyphen_values = true)]
        terms: String,
        /// Print only the [a0;a1,...] notation.
        #[arg(long)]
        notation: bool,
    },
    /// Eigenvalues below λ with their modes, ascending.
    Eig {
        #[arg(allow_hyphen_values = true)]
        slope: String,
        h: String,
        #[arg(allow_hyphen_values = true)]
        lambda: String,
    },
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::internal(format!("cannot start {n} threads: {e}")))
    }
    #[cfg(not(feature = "parallel"))]
    {
        eprintln!("warning: built without the parallel feature; --threads {n} is ignored");
        Ok(())
    }
}

fn sweep_spec(
    cli_tol: Option<f64>,
    slope: Option<String>,
    lambda: Option<String>,
    h_values: Vec<f64>,
    grid: Option<Vec<String>>,
    outputs: Vec<Output>,
    config: Option<PathBuf>,
) -> Result<SweepSpec, CliError> {
    if let Some(path) = config {
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let mut spec: SweepSpec = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid sweep spec {}: {e}", path.display())))?;
        if let Some(tol) = cli_tol {
            spec.tie_tolerance = tol;
        }
        return Ok(spec);
    }
    let (Some(slope), Some(lambda)) = (slope, lambda) else {
        return Err(CliError::usage("sweep needs SLOPE and LAMBDA, or --config"));
    };
    let h_values = match grid {
        Some(g) => HValues::Geometric {
            h_start: commands::parse_real("grid start", &g[0])?,
            h_end: commands::parse_real("grid end", &g[1])?,
            points: g[2]
                .parse()
                .map_err(|_| CliError::usage(format!("grid points must be a count, got {:?}", g[2])))?,
        },
        None => HValues::Explicit(h_values),
    };
    Ok(SweepSpec {
        slope: commands::parse_slope(&slope)?,
        lambda: commands::parse_real("lambda", &lambda)?,
        h_values,
        tie_tolerance: cli_tol.unwrap_or(0.0),
        outputs: if outputs.is_empty() { Output::ALL.into_iter().collect() } else { outputs.into_iter().collect::<BTreeSet<_>>() },
    })
}

fn emit(table: &Table, format: Format) -> Result<(), CliError> {
    let mut out = BufWriter::new(io::stdout().lock());
    table.write(format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    let tol = cli.tol.unwrap_or(0.0);
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(CliError::usage(format!("--tol must be finite and >= 0, got {tol}")));
    }
    if let Some(eps) = cli.eps {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(CliError::usage(format!("--eps must be finite and > 0, got {eps}")));
        }
    }
    let g = Globals { reduced: cli.reduced, tol, eps: cli.eps, max_strips: cli.max_strips };
    match cli.command {
        Command::Count { slope, h, lambda, exact_arith } => {
            emit(&commands::count(&g, &slope, &h, &lambda, exact_arith)?, cli.format)
        }
        Command::Asym { slope, h, lambda } => emit(&commands::asym(&g, &slope, &h, &lambda)?, cli.format),
        Command::Weyl { slope, h, lambda, q } => emit(&commands::weyl(&g, &slope, &h, &lambda, q)?, cli.format),
        Command::Leafwise { slope, lambda, samples, distribution } => {
            match commands::leafwise(&g, &slope, &lambda, samples, distribution)? {
                LeafOutput::Table(table) => emit(&table, cli.format),
                LeafOutput::Json(text) => {
                    println!("{text}");
                    Ok(())
                }
            }
        }
        Command::Heat { slope, h, t } => emit(&commands::heat(&g, &slope, &h, &t)?, cli.format),
        Command::Sweep { slope, lambda, h_values, grid, outputs, config } => {
            let spec = sweep_spec(cli.tol, slope, lambda, h_values, grid, outputs, config)?;
            let (table, failure) = commands::sweep(&g, &spec)?;
            emit(&table, cli.format)?;
            failure.map_or(Ok(()), Err)
        }
        Command::Cf { slope, terms, notation } => {
            let (table, text) = commands::cf(&slope, &terms)?;
            if notation {
                println!("{text}");
                Ok(())
            } else {
                emit(&table, cli.format)
            }
        }
        Command::Eig { slope, h, lambda } => emit(&commands::eig(&g, &slope, &h, &lambda)?, cli.format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_slopes_and_energies_parse_as_positionals() {
        let cli = Cli::try_parse_from(["kronecker", "count", "-5/7", "0.5", "-1"]).unwrap();
        match cli.command {
            Command::Count { slope, lambda, .. } => assert_eq!((slope.as_str(), lambda.as_str()), ("-5/7", "-1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(CoreError::InvalidSlope("x".into())).code, 2);
        assert_eq!(CliError::from(CoreError::InstanceTooLarge("x".into())).code, 3);
        assert_eq!(CliError::from(CoreError::PrecisionExhausted { certified: 3 }).code, 4);
    }
}
