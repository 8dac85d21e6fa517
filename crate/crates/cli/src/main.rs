//! `plc`: principal-line camera geometry from the command line.
//!
//! One JSON document per invocation on standard output. Domain errors go
//! to standard error with exit code 1 and carry the error-class name;
//! usage errors exit with code 2.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use plc_core::equiv::{fuzz, Mode, DEFAULT_TOLERANCE};
use plc_core::{
    calibrate, pl_auto, pl_from_homography, pl_from_ovps, CalibrateOptions, CalibrationInput,
    DirectionPair, Error, Homography, OvpQuad, Scenario, ScenarioSpec,
};

/// Environment variable overriding the default comparison tolerance
/// (1e-9) used by `verify` when `--tolerance` is not given.
const TOLERANCE_ENV: &str = "PLC_TOLERANCE";

#[derive(Parser)]
#[command(
    name = "plc",
    version,
    about = "Principal-line camera geometry: principal lines, vanishing points, \
             principal-point calibration, synthetic views, and route verification",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlForm {
    /// Closed form in the homography entries.
    Homography,
    /// Closed form in the two pairs of orthogonal vanishing points.
    Ovp,
    /// Vanishing-point route with automatic fallback and infinite-point
    /// handling.
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VpRoute {
    /// Vanishing points as images of plane directions (homography columns).
    Columns,
    /// Vanishing points from intersections of projected square edges.
    Edges,
}

#[derive(Args)]
struct PlArgs {
    /// JSON file holding the homography as {"h":[h1,...,h9]} (row-major).
    #[arg(long)]
    homography: PathBuf,
    /// Which closed form to evaluate.
    #[arg(long, value_enum, default_value_t = PlForm::Homography)]
    method: PlForm,
}

#[derive(Args)]
struct VpsArgs {
    /// JSON file holding the homography as {"h":[h1,...,h9]} (row-major).
    #[arg(long)]
    homography: PathBuf,
    /// Direction cosines "A,B" of the second orthogonal pair
    /// [default: the square diagonals, (1,1)/sqrt(2)].
    #[arg(long, value_parser = parse_pair)]
    dir: Option<(f64, f64)>,
    /// Construction route.
    #[arg(long, value_enum, default_value_t = VpRoute::Columns)]
    route: VpRoute,
}

#[derive(Args)]
struct CalibrateArgs {
    /// JSON file with `{"views":[{"plane":[[X,Y],...],"image":[[u,v],...]},...]}`.
    #[arg(long)]
    views: PathBuf,
    /// Pixel residual above which a principal line is dropped as an
    /// outlier.
    #[arg(long, default_value_t = 3.0)]
    outlier_threshold: f64,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of views to generate.
    #[arg(long)]
    poses: u32,
    /// Master seed; output is bit-for-bit reproducible.
    #[arg(long)]
    seed: u64,
    /// Pixel noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Principal point "CX,CY" in pixels.
    #[arg(long, value_parser = parse_pair)]
    pp: (f64, f64),
    /// Focal length in pixels.
    #[arg(long)]
    focal: f64,
    /// Pattern grid "ROWS,COLS,SPACING".
    #[arg(long, value_parser = parse_grid)]
    grid: (u32, u32, f64),
    /// Output file for the generated views (calibration input format).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of guarded homographies to check.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use exact rational arithmetic and require zero discrepancy.
    #[arg(long)]
    exact: bool,
    /// Discrepancy tolerance [default: 1e-9, or the PLC_TOLERANCE
    /// environment variable when set].
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the principal line of a planar view.
    Pl(PlArgs),
    /// Compute the two orthogonal vanishing-point pairs.
    Vps(VpsArgs),
    /// Estimate the principal point from multiple views.
    Calibrate(CalibrateArgs),
    /// Generate synthetic calibration views from random camera poses.
    Synth(SynthArgs),
    /// Verify that the principal-line routes agree on random inputs.
    Verify(VerifyArgs),
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"A,B\", got {s:?}"));
    }
    let a = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn parse_grid(s: &str) -> Result<(u32, u32, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected \"ROWS,COLS,SPACING\", got {s:?}"));
    }
    let rows = parts[0].trim().parse::<u32>().map_err(|e| e.to_string())?;
    let cols = parts[1].trim().parse::<u32>().map_err(|e| e.to_string())?;
    let spacing = parts[2].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((rows, cols, spacing))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn emit<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serialization cannot fail")
    );
}

fn default_tolerance() -> f64 {
    std::env::var(TOLERANCE_ENV)
        .ok()
        .and_then(|v| v.parse::<f64>().ok())
        .unwrap_or(DEFAULT_TOLERANCE)
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Pl(args) => {
            let h: Homography = read_json(&args.homography)?;
            let pl = match args.method {
                PlForm::Homography => pl_from_homography(&h)?,
                PlForm::Ovp => pl_from_ovps(&OvpQuad::from_columns(&h, DirectionPair::diagonal()))?,
                PlForm::Auto => pl_auto(&h, DirectionPair::diagonal())?,
            };
            emit(&pl);
            Ok(ExitCode::SUCCESS)
        }
        Command::Vps(args) => {
            let h: Homography = read_json(&args.homography)?;
            let quad = match args.route {
                VpRoute::Columns => {
                    let dir = match args.dir {
                        Some((a, b)) => DirectionPair::new(a, b)?,
                        None => DirectionPair::diagonal(),
                    };
                    OvpQuad::from_columns(&h, dir)
                }
                VpRoute::Edges => {
                    if args.dir.is_some() {
                        // The edge construction fixes the directions to the
                        // square diagonals; a custom pair is a usage error.
                        eprintln!(
                            "error: --dir cannot be combined with --route edges \
                             (the edge route fixes the diagonal directions)"
                        );
                        return Ok(ExitCode::from(2));
                    }
                    OvpQuad::from_square_edges(&h)?
                }
            };
            emit(&quad);
            Ok(ExitCode::SUCCESS)
        }
        Command::Calibrate(args) => {
            let input: CalibrationInput = read_json(&args.views)?;
            let opts = CalibrateOptions {
                outlier_threshold_px: args.outlier_threshold,
                ..CalibrateOptions::default()
            };
            let report = calibrate(&input.views, &opts)?;
            emit(&report);
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth(args) => {
            let spec = ScenarioSpec {
                poses: args.poses,
                seed: args.seed,
                noise: args.noise,
                pp: [args.pp.0, args.pp.1],
                focal: args.focal,
                grid: [args.grid.0 as f64, args.grid.1 as f64, args.grid.2],
            };
            let views = Scenario::from_spec(&spec)?.views()?;
            let doc = CalibrationInput { views };
            let text = serde_json::to_string_pretty(&doc).expect("output serialization");
            fs::write(&args.out, text)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", args.out.display())))?;
            // Echo the scenario that produced the file.
            emit(&spec);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let tolerance = args.tolerance.unwrap_or_else(default_tolerance);
            let mode = if args.exact {
                Mode::ExactRational
            } else {
                Mode::Float
            };
            let report = fuzz(args.trials, args.seed, tolerance, mode);
            emit(&report);
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
