//! Command-line front end: spectra, phase scans, perturbation tables,
//! operator-identity verification and wavefunction sampling.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 non-physical
//! spectrum (computation still succeeds), 3 verification failure.

use clap::{Args, Parser, Subcommand};
use ptwell::model::{CouplingParams, SpinSector};
use ptwell::operator::{verify_operator_algebra, VerifySettings};
use ptwell::output;
use ptwell::perturbation::compare_perturbation_exact;
use ptwell::report::NormKind;
use ptwell::secular::{extract_boundary, phase_scan, solve_level, solve_spectrum};
use ptwell::states::match_amplitudes;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ptwell", version, about = "Coupled-channel PT-symmetric square well solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Channel coupling X (> 0)
    #[arg(long, short = 'x')]
    x: f64,
    /// Channel coupling Y (> 0)
    #[arg(long, short = 'y')]
    y: f64,
    /// Internal strength Z
    #[arg(long, short = 'z')]
    z: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output path; stdout when omitted
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve all levels 0..=n_max of both spin sectors
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Map the real-spectrum domain over (XY, Z) grids
    Phase {
        /// XY-product grid as start:stop:step
        #[arg(long)]
        xy: String,
        /// Z grid as start:stop:step
        #[arg(long, short = 'z')]
        z: String,
        #[arg(long, default_value_t = 1)]
        n_max: usize,
        /// Output path; stdout when omitted
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Tabulate exact root offsets against the perturbation series
    Perturb {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Output path; stdout when omitted
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Run the operator-identity suite and emit the verification report
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 200)]
        grid_n: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Residual norm for matrix identities
        #[arg(long, default_value = "max-abs", value_parser = ["max-abs", "spectral"])]
        norm: String,
        /// Output path; stdout when omitted
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Sample one bound-state wavefunction on a uniform grid
    Wavefunction {
        #[command(flatten)]
        params: ParamArgs,
        /// Level index
        #[arg(long, short = 'n')]
        n: usize,
        /// Spin sector, +1 or -1
        #[arg(long, allow_hyphen_values = true, default_value = "+1")]
        sigma: String,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Output path; stdout when omitted
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

/// PTWELL_THREADS caps scan parallelism; 0 or unset selects the default.
fn init_thread_pool() {
    if let Ok(value) = std::env::var("PTWELL_THREADS") {
        if let Ok(threads) = value.trim().parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
        }
    }
}

fn parse_params(args: &ParamArgs) -> Result<CouplingParams, String> {
    CouplingParams::new(args.x, args.y, args.z).map_err(|e| e.to_string())
}

fn parse_sigma(text: &str) -> Result<SpinSector, String> {
    match text.trim() {
        "+1" | "1" | "plus" | "+" => Ok(SpinSector::Plus),
        "-1" | "minus" | "-" => Ok(SpinSector::Minus),
        other => Err(format!("sigma must be +1 or -1, got {other:?}")),
    }
}

fn emit(path: &Option<PathBuf>, payload: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, payload).map_err(|e| format!("writing {}: {e}", p.display())),
        None => {
            std::io::stdout()
                .write_all(payload.as_bytes())
                .map_err(|e| format!("writing stdout: {e}"))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Spectrum { params, n_max, tol, out } => {
            let params = parse_params(&params)?;
            if !(tol > 0.0) {
                return Err(format!("tol must be > 0, got {tol}"));
            }
            let spectrum = solve_spectrum(&params, n_max, tol);
            let payload = match out.format.as_str() {
                "csv" => output::spectrum_to_csv(&spectrum),
                _ => output::spectrum_to_json(&spectrum),
            };
            emit(&out.output, &payload)?;
            Ok(if spectrum.physical { ExitCode::from(0) } else { ExitCode::from(2) })
        }
        Command::Phase { xy, z, n_max, output } => {
            let xy_grid = output::parse_range(&xy)?;
            let z_grid = output::parse_range(&z)?;
            let points = phase_scan(&xy_grid, &z_grid, n_max);
            let boundary = extract_boundary(&points);
            emit(&output, &output::phase_to_csv(&points, &boundary))?;
            Ok(ExitCode::from(0))
        }
        Command::Perturb { params, n_min, n_max, tol, output } => {
            let params = parse_params(&params)?;
            if n_min > n_max {
                return Err(format!("n_min {n_min} exceeds n_max {n_max}"));
            }
            let rows =
                compare_perturbation_exact(&params, n_min..=n_max, tol).map_err(|e| e.to_string())?;
            emit(&output, &output::perturb_to_csv(&rows))?;
            Ok(ExitCode::from(0))
        }
        Command::Verify { params, grid_n, n_max, tol, norm, output } => {
            let params = parse_params(&params)?;
            let settings = VerifySettings {
                grid_n,
                n_max,
                tol,
                norm: if norm == "spectral" {
                    NormKind::SpectralEstimate
                } else {
                    NormKind::MaxAbs
                },
            };
            let report =
                verify_operator_algebra(&params, &settings).map_err(|e| e.to_string())?;
            emit(&output, &output::report_to_json(&params, grid_n, n_max, &report))?;
            Ok(if report.all_pass() { ExitCode::from(0) } else { ExitCode::from(3) })
        }
        Command::Wavefunction { params, n, sigma, samples, tol, output } => {
            let params = parse_params(&params)?;
            let sigma = parse_sigma(&sigma)?;
            if samples < 2 {
                return Err(format!("samples must be >= 2, got {samples}"));
            }
            let root = solve_level(n, sigma, &params, tol).map_err(|e| e.to_string())?;
            let state = match_amplitudes(&root, &params).map_err(|e| e.to_string())?;
            emit(&output, &output::wavefunction_to_csv(&state, &params, samples))?;
            Ok(ExitCode::from(0))
        }
    }
}
