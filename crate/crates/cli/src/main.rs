use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use coulomb_equilibrium::error::Error;
use coulomb_equilibrium::exec::Execution;
use coulomb_equilibrium::export::{self, PROFILE_HEADER};
use coulomb_equilibrium::field::ChargeConfig;
use coulomb_equilibrium::measure::EquilibriumMeasure;
use coulomb_equilibrium::oracle::{minimize, OracleOptions, OracleResult};
use coulomb_equilibrium::regime::{classify, Radius, Regime, SupportKind};
use coulomb_equilibrium::verify::{certify, FrostmanReport, GridSpec};

const EXIT_INTERNAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Weighted Coulomb equilibrium measures for a pair of charges above ℝᵈ.
#[derive(Debug, Parser)]
#[command(name = "coulomb-eq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the case tag, admissibility and support.
    Classify {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve for the support and print radii and masses; CSV gives the density table.
    Solve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Largest radius of the CSV density table.
        #[arg(long)]
        rmax: Option<f64>,
        /// Number of equispaced radii in the CSV density table.
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Check the Frostman conditions on a radial grid; exits 3 when they fail.
    Verify {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Allowed deviation of U + Q from its mean on the support.
        #[arg(long, default_value_t = 1e-6)]
        tol_eq: f64,
        #[arg(long, default_value_t = 200)]
        interior_points: usize,
        #[arg(long, default_value_t = 100)]
        exterior_points: usize,
        /// Also write the sampled potential as CSV with columns r,U,Q,U_plus_Q.
        #[arg(long)]
        grid_csv: Option<PathBuf>,
    },
    /// Draw points from the equilibrium measure.
    Sample {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Minimize the discrete weighted energy of n particles.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-5)]
        gtol: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iters: usize,
        /// Also write the final particle positions as CSV.
        #[arg(long)]
        points_csv: Option<PathBuf>,
    },
    /// Tabulate r, density, mass, Q and U + Q for plotting.
    Profile {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        rmax: Option<f64>,
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON file holding a configuration, bare or under a "config" key.
    #[arg(long, conflicts_with_all = ["d", "gamma1", "gamma2", "h1", "h2"])]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<u32>,
    /// Repellent charge.
    #[arg(long)]
    gamma1: Option<f64>,
    /// Attractive charge.
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    h1: Option<f64>,
    #[arg(long)]
    h2: Option<f64>,
    /// Equality band for the weakly admissible line gamma2 - gamma1 = 1.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Run every computation on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type CliResult<T> = Result<T, Failure>;

impl ConfigArgs {
    fn exec(&self) -> Execution {
        if self.serial {
            Execution::Serial
        } else {
            Execution::Parallel
        }
    }

    fn resolve(&self) -> CliResult<ChargeConfig> {
        if let Some(path) = &self.config {
            return read_config(path);
        }
        let missing: Vec<&str> = [("--d", self.d.is_none()), ("--gamma2", self.gamma2.is_none()), ("--h2", self.h2.is_none())]
            .into_iter()
            .filter_map(|(flag, absent)| absent.then_some(flag))
            .collect();
        if !missing.is_empty() {
            return Err(Failure::Usage(format!("missing required flags: {}", missing.join(", "))));
        }
        let cfg = ChargeConfig::new(
            self.d.unwrap_or_default(),
            self.gamma1.unwrap_or(0.0),
            self.gamma2.unwrap_or_default(),
            self.h1.unwrap_or(1.0),
            self.h2.unwrap_or_default(),
        )?;
        Ok(cfg)
    }
}

fn read_config(path: &Path) -> CliResult<ChargeConfig> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    let inner = value.get("config").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())).into())
}

fn emit(out: &OutputArgs, body: &[u8]) -> CliResult<()> {
    match &out.out {
        Some(path) => fs::write(path, body)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Invariant(e.to_string()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

#[derive(Serialize)]
struct SupportOut {
    kind: SupportKind,
    inner: f64,
    outer: Radius,
}

#[derive(Serialize)]
struct ClassifyOut {
    config: ChargeConfig,
    #[serde(flatten)]
    regime: Regime,
    support: SupportOut,
}

impl ClassifyOut {
    fn new(config: ChargeConfig, regime: Regime) -> Self {
        let support = SupportOut { kind: regime.support_kind(), inner: regime.inner, outer: regime.outer };
        Self { config, regime, support }
    }
}

#[derive(Serialize)]
struct SolveOut {
    #[serde(flatten)]
    classification: ClassifyOut,
    total_mass: f64,
    quadrature_mass: f64,
    density_at_inner: f64,
    density_at_outer: Option<f64>,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    config: ChargeConfig,
    #[serde(flatten)]
    report: &'a FrostmanReport,
}

#[derive(Serialize)]
struct SampleOut {
    config: ChargeConfig,
    seed: u64,
    points: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct SimulateOut {
    config: ChargeConfig,
    #[serde(flatten)]
    result: OracleResult,
}

fn default_rmax(m: &EquilibriumMeasure) -> f64 {
    match m.regime.outer {
        Radius::Finite(r) => 1.5 * r,
        Radius::Infinite => 4.0 * m.length_scale(),
    }
}

fn to_csv<F>(body: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> coulomb_equilibrium::error::Result<()>,
{
    let mut buf = Vec::new();
    body(&mut buf)?;
    Ok(buf)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Classify { cfg, out } => {
            let config = cfg.resolve()?;
            let regime = classify(&config, cfg.tol)?;
            let body = match out.format {
                Format::Json => json(&ClassifyOut::new(config, regime))?,
                Format::Csv => {
                    let header = "d,gamma1,gamma2,h1,h2,case,kind,inner,outer,r_c";
                    let outer = regime.outer.finite().map_or_else(|| "inf".to_string(), export::format_number);
                    let r_c = regime.r_c.map_or_else(String::new, export::format_number);
                    let row = format!(
                        "{},{},{},{},{},{},{:?},{},{outer},{r_c}",
                        config.dim(),
                        export::format_number(config.gamma1),
                        export::format_number(config.gamma2),
                        export::format_number(config.h1),
                        export::format_number(config.h2),
                        regime.case,
                        regime.support_kind(),
                        export::format_number(regime.inner),
                    );
                    format!("{header}\n{row}\n").into_bytes()
                }
            };
            emit(&out, &body)
        }
        Command::Solve { cfg, out, rmax, n } => {
            let config = cfg.resolve()?;
            let m = EquilibriumMeasure::new(config, cfg.tol)?;
            let body = match out.format {
                Format::Json => {
                    let support = m.support();
                    json(&SolveOut {
                        classification: ClassifyOut::new(config, m.regime),
                        total_mass: m.total_mass(),
                        quadrature_mass: m.quadrature_mass()?,
                        density_at_inner: m.density(support.inner),
                        density_at_outer: support.outer.finite().map(|r| m.density(r)),
                    })?
                }
                Format::Csv => {
                    let radii = export::profile_radii(&m, rmax.unwrap_or_else(|| default_rmax(&m)), n)?;
                    to_csv(|w| export::write_density_csv(w, &m, &radii))?
                }
            };
            emit(&out, &body)
        }
        Command::Verify { cfg, out, tol_eq, interior_points, exterior_points, grid_csv } => {
            let config = cfg.resolve()?;
            let m = EquilibriumMeasure::new(config, cfg.tol)?;
            let grid = GridSpec { interior_points, exterior_points, ..GridSpec::default() };
            let (_, report) = certify(m, tol_eq, &grid, cfg.exec())?;
            if let Some(path) = grid_csv {
                export::to_file(path, |w| export::write_potential_csv(w, &report.samples))?;
            }
            let body = match out.format {
                Format::Json => json(&VerifyOut { config, report: &report })?,
                Format::Csv => to_csv(|w| export::write_potential_csv(w, &report.samples))?,
            };
            emit(&out, &body)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "Frostman check failed: deviation {:e} on the support, margin {:?} off it, tolerance {:e}",
                    report.max_dev_on_support, report.min_margin_off_support, report.tol_eq
                )))
            }
        }
        Command::Sample { cfg, out, n, seed } => {
            let config = cfg.resolve()?;
            let m = EquilibriumMeasure::new(config, cfg.tol)?;
            let points = m.sample(n, seed, cfg.exec());
            let body = match out.format {
                Format::Json => json(&SampleOut { config, seed, points })?,
                Format::Csv => to_csv(|w| export::write_points_csv(w, &points))?,
            };
            emit(&out, &body)
        }
        Command::Simulate { cfg, out, n, seed, gtol, max_iters, points_csv } => {
            let config = cfg.resolve()?;
            let opts = OracleOptions { gtol, max_iters, exec: cfg.exec(), ..OracleOptions::default() };
            let run = minimize(&config, n, seed, &opts)?;
            let points = run.system.points();
            if let Some(path) = points_csv {
                export::to_file(path, |w| export::write_points_csv(w, &points))?;
            }
            let body = match out.format {
                Format::Json => json(&SimulateOut { config, result: run.result })?,
                Format::Csv => to_csv(|w| export::write_points_csv(w, &points))?,
            };
            emit(&out, &body)
        }
        Command::Profile { cfg, out, rmax, n } => {
            let config = cfg.resolve()?;
            let m = EquilibriumMeasure::new(config, cfg.tol)?;
            let rows = export::profile(&m, rmax.unwrap_or_else(|| default_rmax(&m)), n, cfg.exec())?;
            let body = match out.format {
                Format::Json => json(&rows)?,
                Format::Csv => to_csv(|w| export::write_profile_csv(w, &rows))?,
            };
            debug_assert!(out.format == Format::Json || body.starts_with(PROFILE_HEADER.as_bytes()));
            emit(&out, &body)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotAdmissible { .. } | Error::InvalidConfig(_) | Error::NotConfining { .. } => EXIT_CONFIG,
        _ => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
