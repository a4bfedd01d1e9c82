//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a failing check, 2 for
//! configuration and input errors.

mod commands;
pub mod config;
mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    compute, posterior, sweep, ClosedFormValue, ComputeOutput, PosteriorOutput, PosteriorSummary,
    SweepRow, MAX_EXACT_SECTOR,
};
use config::{apply_override, load_map, ConfigError, ConfigMap, OutputFormat, RunConfig};

use crate::interferometer::NormalOrderedTerms;
use crate::verify::{run_suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Library(#[from] crate::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "mzbayes",
    version,
    about = "Bayesian phase accuracy of a Mach-Zehnder interferometer"
)]
pub struct Cli {
    /// Output format; defaults to text on stdout, or csv when writing a file
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Write results to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ConfigArgs {
    /// Flat JSON config file
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Override or add a config key, e.g. `--set a.r=0.7`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Engine and closed-form 1/Δθ² for one configuration
    Compute(ConfigArgs),
    /// Tabulate 1/Δθ² over one swept parameter
    Sweep(ConfigArgs),
    /// Exact and Gaussian posteriors after M null results
    Posterior(ConfigArgs),
    /// Run the invariant suites
    Verify {
        #[arg(long, default_value_t = 12)]
        max_photons: usize,

        /// Drop the a†a term from the normal-ordering identity; the suite must then fail
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// Parses arguments, runs the command, and returns the process exit code.
/// Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn load_config(args: &ConfigArgs) -> Result<(ConfigMap, RunConfig), CliError> {
    let mut map = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            load_map(&text)?
        }
        None => ConfigMap::new(),
    };
    for o in &args.overrides {
        apply_override(&mut map, o)?;
    }
    let config = RunConfig::from_map(&map)?;
    Ok((map, config))
}

struct Destination {
    format: OutputFormat,
    path: Option<PathBuf>,
}

impl Destination {
    fn resolve(cli: &Cli, config: Option<&RunConfig>) -> Self {
        let path = cli
            .output
            .clone()
            .or_else(|| config.and_then(|c| c.output.clone()));
        let format = cli
            .format
            .or_else(|| config.and_then(|c| c.format))
            .unwrap_or_else(|| match &path {
                Some(p) if p.extension().is_some_and(|e| e == "json") => OutputFormat::Json,
                Some(_) => OutputFormat::Csv,
                None => OutputFormat::Text,
            });
        Self { format, path }
    }

    fn write(&self, body: &str) -> Result<(), CliError> {
        match &self.path {
            Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Compute(args) => {
            let (_, config) = load_config(args)?;
            let out = compute(&config)?;
            let dest = Destination::resolve(cli, Some(&config));
            dest.write(&render::compute(&out, dest.format))?;
            Ok(EXIT_OK)
        }
        Command::Sweep(args) => {
            let (map, config) = load_config(args)?;
            let rows = sweep(&map, &config)?;
            let dest = Destination::resolve(cli, Some(&config));
            dest.write(&render::sweep(&rows, dest.format))?;
            Ok(EXIT_OK)
        }
        Command::Posterior(args) => {
            let (_, config) = load_config(args)?;
            let out = posterior(&config)?;
            let dest = Destination::resolve(cli, Some(&config));
            if dest.format == OutputFormat::Csv {
                eprint!("{}", render::posterior_summary_lines(&out.summary));
            }
            dest.write(&render::posterior(&out, dest.format))?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            max_photons,
            inject_fault,
        } => {
            if *max_photons < 1 {
                return Err(ConfigError::new("max-photons", "must be at least 1").into());
            }
            let identity_terms = if *inject_fault {
                NormalOrderedTerms {
                    a_number: false,
                    ..Default::default()
                }
            } else {
                NormalOrderedTerms::default()
            };
            let report = run_suite(SuiteOptions {
                max_total_photons: *max_photons,
                seed: cli.seed,
                identity_terms,
            });
            let dest = Destination::resolve(cli, None);
            dest.write(&render::verify(&report, dest.format))?;
            Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}
