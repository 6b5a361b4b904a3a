//! Command-line frontend: fit a parameterization, run convergence
//! studies, evaluate a saved document densely, and verify geometric
//! properties.
//!
//! Exit codes: 0 success, 2 input error, 3 tolerance/convergence failure,
//! 4 property failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use phodcos::document::{DocumentMetadata, ParameterizationDocument};
use phodcos::ingest::{builtin_source, load_orbit_csv, validate_source, CurveSource, SampledCurve};
use phodcos::pipeline::{
    self, conversion_error, enforce_frame_continuity, interpolate_path, Growth, PipelineConfig,
};
use phodcos::verify::run_property_suites;

#[derive(Parser)]
#[command(name = "phodcos", version, about = "Piecewise PH-curve parameterization of 3D curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Curve selection shared by the commands: a built-in name or a CSV file.
#[derive(Args)]
struct SourceSpec {
    /// Built-in curve: exemplary, exemplary-planar, line or helix.
    #[arg(long, conflicts_with = "csv")]
    curve: Option<String>,
    /// CSV trajectory file (x,y,z or t,x,y,z rows).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Maximum allowed spline fit residual for CSV sources.
    #[arg(long, default_value_t = 1e-6)]
    fit_tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a PH parameterization to a curve and write it as JSON.
    Fit {
        #[command(flatten)]
        source: SourceSpec,
        /// Conversion-error tolerance.
        #[arg(long)]
        epsilon: f64,
        /// Output document path.
        #[arg(long)]
        output: PathBuf,
        /// Initial segment count.
        #[arg(long, default_value_t = 2)]
        n_s_init: usize,
        /// Segment-count growth per iteration: double or increment.
        #[arg(long, default_value = "double")]
        growth: String,
    },
    /// Error-vs-segment-count study over n_s = 2^m.
    Convergence {
        #[command(flatten)]
        source: SourceSpec,
        #[arg(long, default_value_t = 0)]
        min_exp: u32,
        #[arg(long, default_value_t = 8)]
        max_exp: u32,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample a saved document densely along the global parameter.
    Eval {
        /// Parameterization document produced by `fit`.
        #[arg(long)]
        document: PathBuf,
        /// Number of uniform samples.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the geometric property suites against a curve.
    Verify {
        #[command(flatten)]
        source: SourceSpec,
    },
}

const EXIT_INPUT: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn tolerance(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_TOLERANCE,
            message: message.into(),
        }
    }
}

fn resolve_source(spec: &SourceSpec) -> Result<(Box<dyn CurveSource>, String), CliError> {
    match (&spec.curve, &spec.csv) {
        (Some(name), None) => {
            let src = builtin_source(name)
                .ok_or_else(|| CliError::input(format!("unknown builtin curve {name:?}")))?;
            let desc = src.describe();
            Ok((src, desc))
        }
        (None, Some(path)) => {
            let samples = load_orbit_csv(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            let mut fitted = SampledCurve::from_samples(&samples, spec.fit_tol)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            fitted.set_description(format!("csv:{}", path.display()));
            let desc = fitted.describe();
            Ok((Box::new(fitted), desc))
        }
        _ => Err(CliError::input("exactly one of --curve or --csv is required")),
    }
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn cmd_fit(
    source: &SourceSpec,
    epsilon: f64,
    output: &PathBuf,
    n_s_init: usize,
    growth: &str,
) -> Result<(), CliError> {
    let (src, description) = resolve_source(source)?;
    validate_source(src.as_ref()).map_err(|e| CliError::input(e.to_string()))?;
    let mut cfg = PipelineConfig::new(epsilon);
    cfg.n_s_init = n_s_init;
    cfg.growth = match growth {
        "double" => Growth::Double,
        "increment" => Growth::Increment,
        other => return Err(CliError::input(format!("unknown growth strategy {other:?}"))),
    };
    let (path, rows) =
        pipeline::phodcos(src.as_ref(), &cfg).map_err(|e| CliError::tolerance(e.to_string()))?;
    let last = rows.last().expect("at least one iteration");
    let doc = ParameterizationDocument::from_path(
        &path,
        DocumentMetadata {
            source: description,
            epsilon,
            n_segments: path.segments().len(),
            max_error: last.max_error,
        },
    );
    doc.save(output)
        .map_err(|e| CliError::input(format!("{}: {e}", output.display())))?;
    println!(
        "n_segments = {}, max_error = {:.16e}",
        path.segments().len(),
        last.max_error
    );
    Ok(())
}

fn cmd_convergence(
    source: &SourceSpec,
    min_exp: u32,
    max_exp: u32,
    output: Option<&PathBuf>,
) -> Result<(), CliError> {
    if min_exp > max_exp || max_exp > 8 {
        return Err(CliError::input(
            "exponent range must satisfy 0 <= min-exp <= max-exp <= 8",
        ));
    }
    let (src, _) = resolve_source(source)?;
    validate_source(src.as_ref()).map_err(|e| CliError::input(e.to_string()))?;
    let mut out = String::from("n_segments,max_error,ratio\n");
    let mut prev: Option<f64> = None;
    for m in min_exp..=max_exp {
        let n_s = 1usize << m;
        let path = interpolate_path(src.as_ref(), n_s)
            .and_then(enforce_frame_continuity)
            .map_err(|e| CliError::tolerance(e.to_string()))?;
        let error = conversion_error(src.as_ref(), &path, 1000);
        // ratios are meaningless once errors sit at the double-precision floor
        let ratio = match prev {
            Some(p) if error > 1e-13 => format!("{:.16e}", p / error),
            _ => "-".into(),
        };
        out.push_str(&format!("{n_s},{error:.16e},{ratio}\n"));
        prev = Some(error);
    }
    write_output(output, &out)
}

fn cmd_eval(document: &PathBuf, samples: usize, output: Option<&PathBuf>) -> Result<(), CliError> {
    if samples < 2 {
        return Err(CliError::input("need at least 2 samples"));
    }
    let doc = ParameterizationDocument::load(document)
        .map_err(|e| CliError::input(format!("{}: {e}", document.display())))?;
    let path = doc
        .to_ph_path()
        .map_err(|e| CliError::input(format!("{}: {e}", document.display())))?;
    let (xi0, xif) = path.domain();
    let mut out = String::from(
        "xi,px,py,pz,r11,r12,r13,r21,r22,r23,r31,r32,r33,wx,wy,wz,sigma,arc_length,curvature,torsion\n",
    );
    for i in 0..samples {
        let xi = xi0 + (xif - xi0) * i as f64 / (samples - 1) as f64;
        let p = path.position(xi);
        let f = path
            .frame(xi)
            .map_err(|e| CliError::tolerance(format!("xi = {xi}: {e}")))?;
        let g = path
            .geometry(xi)
            .map_err(|e| CliError::tolerance(format!("xi = {xi}: {e}")))?;
        let r = f.rotation.to_row_major();
        out.push_str(&format!("{xi:.16e}"));
        for v in p
            .to_array()
            .into_iter()
            .chain(r)
            .chain(f.omega.to_array())
            .chain([f.sigma, g.arc_length, g.curvature, g.torsion])
        {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    write_output(output, &out)
}

fn cmd_verify(source: &SourceSpec) -> Result<(), CliError> {
    let (src, description) = resolve_source(source)?;
    validate_source(src.as_ref()).map_err(|e| CliError::input(e.to_string()))?;
    let reports = run_property_suites(src.as_ref());
    let mut failed = Vec::new();
    println!("source: {description}");
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {} — {}", r.name, r.detail);
        if !r.passed {
            failed.push(r.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_PROPERTY,
            message: format!("failed properties: {}", failed.join(", ")),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit {
            source,
            epsilon,
            output,
            n_s_init,
            growth,
        } => cmd_fit(source, *epsilon, output, *n_s_init, growth),
        Command::Convergence {
            source,
            min_exp,
            max_exp,
            output,
        } => cmd_convergence(source, *min_exp, *max_exp, output.as_ref()),
        Command::Eval {
            document,
            samples,
            output,
        } => cmd_eval(document, *samples, output.as_ref()),
        Command::Verify { source } => cmd_verify(source),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
