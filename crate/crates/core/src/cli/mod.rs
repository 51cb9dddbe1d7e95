//! Command-line driver: parameter sweeps, the eigen-solution cache and
//! CSV/JSON tables.
//!
//! Exit status: 0 success, 2 configuration error, 3 numerical failure,
//! 4 partial failure (some rows carry a non-`ok` status).

pub mod cache;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::HamiltonianConvention;
use crate::eigensolver::Spin;
use crate::qsl::DisplacementModel;
use crate::Error;
use cache::CachedSolver;
use commands::CommandOutput;
use config::{CommandKind, Format, PartialConfig, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "landau-qsl", version, about = "Landau levels and quantum speed limits in power-law magnetic fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Eigenvalue tables α_ν, ε_ν per (n, B0, spin)
    Eigen,
    /// ρ_disp, τ and v/c for superpositions (ν, ν+1) over an (n, B0, spin) grid
    QslSweep,
    /// Saturated speed limit per (n, spin, ν)
    Sqsl,
    /// Bremermann–Bekenstein bound over an (n, B0, spin) grid
    Bb,
    /// Field at which the spin-up and spin-down gaps coincide, per n
    Critical,
    /// Analytic speed limit, swept SQSL and fitted eigenvalue constants, per n
    Ansatz,
    /// Laboratory scenarios: shaped pole pieces and a uniform 10 G field
    Design,
}

impl Command {
    pub fn kind(self) -> CommandKind {
        match self {
            Command::Eigen => CommandKind::Eigen,
            Command::QslSweep => CommandKind::QslSweep,
            Command::Sqsl => CommandKind::Sqsl,
            Command::Bb => CommandKind::Bb,
            Command::Critical => CommandKind::Critical,
            Command::Ansatz => CommandKind::Ansatz,
            Command::Design => CommandKind::Design,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpinSelection {
    Up,
    Down,
    Both,
}

impl SpinSelection {
    fn spins(self) -> Vec<Spin> {
        match self {
            SpinSelection::Up => vec![Spin::Up],
            SpinSelection::Down => vec![Spin::Down],
            SpinSelection::Both => Spin::BOTH.to_vec(),
        }
    }
}

fn parse_displacement(s: &str) -> Result<DisplacementModel, Error> {
    s.parse()
}

fn parse_hamiltonian(s: &str) -> Result<HamiltonianConvention, Error> {
    s.parse()
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Field exponents, comma separated (e.g. --n=-0.5,0,0.5)
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub n: Option<Vec<f64>>,
    /// Lowest field scale B0 in G·pm⁻ⁿ
    #[arg(long = "b0-min", global = true)]
    pub b0_min: Option<f64>,
    /// Highest field scale B0 in G·pm⁻ⁿ
    #[arg(long = "b0-max", global = true)]
    pub b0_max: Option<f64>,
    #[arg(long = "points-per-decade", global = true)]
    pub points_per_decade: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub spin: Option<SpinSelection>,
    /// Angular quantum number
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub m: Option<i32>,
    /// Levels per eigen table
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Superpositions (ν, ν+1) for ν < nu-max
    #[arg(long = "nu-max", global = true)]
    pub nu_max: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Eigen-solution cache directory (default: $LANDAU_QSL_CACHE_DIR, else no cache)
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially, 0 uses every core
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Relative eigenvalue tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// dirac-spinor | scalar-channel
    #[arg(long, global = true, value_parser = parse_displacement)]
    pub displacement: Option<DisplacementModel>,
    /// with-rest-energy | kinetic-only
    #[arg(long, global = true, value_parser = parse_hamiltonian)]
    pub hamiltonian: Option<HamiltonianConvention>,
}

impl Options {
    fn to_partial(&self) -> PartialConfig {
        PartialConfig {
            command: None,
            n: self.n.clone(),
            b0_min: self.b0_min,
            b0_max: self.b0_max,
            points_per_decade: self.points_per_decade,
            spins: self.spin.map(SpinSelection::spins),
            m: self.m,
            levels: self.levels,
            nu_max: self.nu_max,
            format: self.format,
            out: self.out.clone(),
            cache_dir: self.cache_dir.clone(),
            jobs: self.jobs,
            tol: self.tol,
            displacement: self.displacement,
            hamiltonian: self.hamiltonian,
            design: None,
        }
    }
}

/// Short machine-readable name of an error.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid-parameter",
        Error::SingularField { .. } => "singular-field",
        Error::ApproximationInvalid { .. } => "approximation-invalid",
        Error::NoConvergence { .. } => "no-convergence",
        Error::DomainOverflow { .. } => "domain-overflow",
        Error::Degenerate { .. } => "degenerate",
        Error::IndexOutOfRange { .. } => "index-out-of-range",
        Error::InfiniteTime => "infinite-time",
        Error::InsufficientSamples(_) => "insufficient-samples",
        Error::UseExactValue => "use-exact-value",
        Error::Unconverged => "unconverged",
        Error::Config(_) => "config",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

fn exit_code_for(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

fn report_error(e: &Error) {
    let record = json!({ "error": { "kind": error_kind(e), "message": e.to_string() } });
    eprintln!("{record}");
}

pub fn resolve_config(cli: &Cli) -> Result<SweepConfig, Error> {
    let file = match &cli.options.config {
        Some(path) => PartialConfig::from_file(path)?,
        None => PartialConfig::default(),
    };
    SweepConfig::resolve(cli.command.kind(), file.overlay(cli.options.to_partial()))
}

pub fn execute(cfg: &SweepConfig) -> Result<CommandOutput, Error> {
    let source = CachedSolver::new(cfg.cache_dir.clone())
        .map_err(|e| Error::Config(format!("cache directory: {e}")))?;
    match cfg.command {
        CommandKind::Eigen => commands::cmd_eigen(cfg, &source),
        CommandKind::QslSweep => commands::cmd_qsl_sweep(cfg, &source),
        CommandKind::Sqsl => commands::cmd_sqsl(cfg, &source),
        CommandKind::Bb => commands::cmd_bb(cfg, &source),
        CommandKind::Critical => commands::cmd_critical(cfg, &source),
        CommandKind::Ansatz => commands::cmd_ansatz(cfg, &source),
        CommandKind::Design => commands::cmd_design(cfg, &source),
    }
}

fn write_output(cfg: &SweepConfig, out: &CommandOutput) -> Result<(), Error> {
    let mut buf = Vec::new();
    out.table.write(cfg.format, &mut buf)?;
    match &cfg.out {
        Some(path) => fs::write(path, &buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            report_error(&e);
            return EXIT_CONFIG;
        }
    };
    let out = match execute(&cfg) {
        Ok(out) => out,
        Err(e) => {
            report_error(&e);
            return exit_code_for(&e);
        }
    };
    if let Err(e) = write_output(&cfg, &out) {
        report_error(&e);
        return EXIT_CONFIG;
    }
    let rows = out.table.rows.len();
    if out.failed_rows == 0 {
        EXIT_OK
    } else {
        let total = out.failed_rows == rows && out.failures_numerical;
        let status = if total { "failed" } else { "partial-failure" };
        eprintln!(
            "{}",
            json!({ "status": status, "failed_rows": out.failed_rows, "rows": rows })
        );
        if total {
            EXIT_NUMERICAL
        } else {
            EXIT_PARTIAL
        }
    }
}
