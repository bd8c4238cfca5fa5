//! `perorbit` — construct repelling periodic points of the built-in
//! transcendental families by prescribed symbolic itinerary.
//!
//! Exit status: 0 on full success, 2 if any itinerary failed to solve,
//! 1 on configuration errors.

use clap::Parser;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use perorbit_cli::pipeline::{run, Family, JobConfig, OutputFormat};
use perorbit_cli::render::render_diagnostic;
use perorbit_cli::report::{to_csv, to_json};

#[derive(Parser, Debug)]
#[command(
    name = "perorbit",
    about = "Repelling periodic points of transcendental maps, by itinerary"
)]
struct Args {
    /// Function family: exp (lambda e^z), sin (lambda sin z) or
    /// expoverlinear (e^z / (z - pole)).
    #[arg(long)]
    family: String,

    /// Parameter lambda as re,im (exp and sin families).
    #[arg(long, default_value = "1,0", value_parser = parse_complex)]
    lambda: Complex64,

    /// Pole as re,im (expoverlinear family).
    #[arg(long, default_value = "0,0", value_parser = parse_complex)]
    pole: Complex64,

    /// Radius of the singular disk complement.
    #[arg(long)]
    radius: f64,

    /// Angle of the straight cut ray, radians.
    #[arg(long, default_value_t = PI)]
    delta_angle: f64,

    /// Period: length of the itineraries to enumerate.
    #[arg(long)]
    period: u32,

    /// Half-width K of the branch window (|k| <= K).
    #[arg(long)]
    window: u32,

    /// Keep only itineraries that are not proper powers.
    #[arg(long, default_value_t = false)]
    minimal_only: bool,

    /// Euclidean step tolerance of the fixed-point iteration.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,

    /// Iteration cap per itinerary.
    #[arg(long, default_value_t = 200)]
    max_iter: u32,

    /// Output format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,

    /// Also write a diagnostic PPM image here.
    #[arg(long)]
    image: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im but got '{s}'"))?;
    let re: f64 = re.trim().parse().map_err(|_| format!("bad real part '{re}'"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part '{im}'"))?;
    Ok(Complex64::new(re, im))
}

fn main() -> ExitCode {
    // clap exits with status 2 on parse errors; configuration problems must
    // report status 1, so parsing is intercepted.
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.kind() == clap::error::ErrorKind::DisplayHelp
            || e.kind() == clap::error::ErrorKind::DisplayVersion =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    match execute(args) {
        Ok(any_failures) => {
            if any_failures {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn execute(args: Args) -> Result<bool, String> {
    let family = Family::parse(&args.family)?;
    let output_format = match args.format.to_ascii_lowercase().as_str() {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => return Err(format!("unknown format '{other}' (expected json or csv)")),
    };

    let config = JobConfig {
        family,
        lambda: args.lambda,
        pole: args.pole,
        radius: args.radius,
        delta_angle: args.delta_angle,
        period: args.period,
        window: args.window,
        minimal_only: args.minimal_only,
        tol: args.tol,
        max_iter: args.max_iter,
        output_format,
        image_path: args.image.as_ref().map(|p| p.display().to_string()),
    };

    let output = run(config)?;

    let rendered = match output_format {
        OutputFormat::Json => to_json(&output),
        OutputFormat::Csv => to_csv(&output),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }

    if let Some(path) = &args.image {
        render_diagnostic(&output.spec, &output.partition, &output.report.results, path)
            .map_err(|e| format!("cannot write image {}: {e}", path.display()))?;
    }

    Ok(!output.report.failures.is_empty())
}
