use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use spraygeom_cli::{digest, eval_tensor, parse_point, run, validate, Overrides, Report, Scenario, TENSORS};

#[derive(Parser)]
#[command(name = "spraygeom", version, about = "Verify spray geometry identities on Lie algebroid scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario.
    Check {
        file: PathBuf,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Default tolerance for requested checks without their own.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print tensor components at one point.
    Eval {
        file: PathBuf,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(TENSORS))]
        tensor: String,
        /// Coordinates as `x=0.1,0.2;y=1,-1`.
        #[arg(long)]
        at: String,
    },
    /// Parse a scenario and check its structure equations.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn load(path: &Path) -> Result<(Scenario, String), ExitCode> {
    let bytes = std::fs::read(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| {
        eprintln!("error: {} is not valid UTF-8", path.display());
        ExitCode::from(2)
    })?;
    let scenario = spraygeom_cli::parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(2)
    })?;
    Ok((scenario, digest(&bytes)))
}

fn emit(report: &Report, format: Format, started: Instant) -> ExitCode {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(Some(started.elapsed())),
    };
    // A closed pipe is not an error of the run.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let started = Instant::now();
    match cli.command {
        Command::Check {
            file,
            points,
            seed,
            tol,
            format,
        } => {
            let (scenario, digest) = match load(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            if points == Some(0) {
                eprintln!("error: --points must be positive");
                return ExitCode::from(2);
            }
            let report = run(&scenario, &digest, &Overrides { points, seed, tol });
            emit(&report, format, started)
        }
        Command::Validate { file, format } => {
            let (scenario, digest) = match load(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let report = validate(&scenario, &digest, &Overrides::default());
            emit(&report, format, started)
        }
        Command::Eval { file, tensor, at } => {
            let (scenario, _) = match load(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let point = match parse_point(&at, scenario.space()) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: --at: {e}");
                    return ExitCode::from(2);
                }
            };
            match eval_tensor(&scenario, &tensor, &point) {
                Ok(values) => {
                    let mut out = std::io::stdout().lock();
                    for (label, v) in values {
                        if writeln!(out, "{label} = {v:e}").is_err() {
                            break;
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
