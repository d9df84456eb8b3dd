use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nilgauss::job::{builtin_job, run, JobConfig, ReportDocument, BUILTIN_JOBS};
use nilgauss::{GeometryError, Method};

#[derive(Parser)]
#[command(name = "nilgauss", version, about = "Gauss map Laplacian for hypersurfaces in 2-step nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a job file without computing anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a single point (`--point`, the first listed point, or the domain centre).
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        point: Option<Vec<f64>>,
    },
    /// Evaluate every grid point.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep with the numerical oracle alongside the closed forms.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in jobs, or run one.
    Examples {
        name: Option<String>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Harmonicity tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Checks,
    Config(String),
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load(path: &PathBuf) -> Result<JobConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(JobConfig::from_json(&text)?)
}

fn emit(report: &ReportDocument, out: &Output) -> Result<(), Failure> {
    let mut buf = Vec::new();
    match out.format {
        Format::Json => {
            buf.extend(report.to_json()?.as_bytes());
            buf.push(b'\n');
        }
        Format::Csv => report.write_csv(&mut buf)?,
    }
    match &out.out {
        Some(p) => fs::write(p, buf).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => io::stdout().write_all(&buf).map_err(|e| Failure::Config(e.to_string()))?,
    }
    for (name, c) in &report.summary.checks {
        eprintln!("{} {name}: {:.3e} (tol {:.1e})", if c.passed { "PASS" } else { "FAIL" }, c.value, c.tol);
    }
    if report.summary.all_passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn run_with(mut cfg: JobConfig, out: &Output) -> Result<(), Failure> {
    if let Some(t) = out.tol {
        cfg.tolerances.harmonic = t;
    }
    if let Some(s) = out.seed {
        cfg.seed = s;
    }
    emit(&run(&cfg)?, out)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { config } => {
            let job = load(&config)?.prepare()?;
            println!("ok: {} points, {} methods", job.points.len(), job.config.methods.len());
            Ok(())
        }
        Command::Report { common, point } => {
            let mut cfg = load(&common.config)?;
            let u = match point {
                Some(p) => p,
                None => match cfg.points.as_ref().and_then(|p| p.first()) {
                    Some(p) => p.clone(),
                    None => cfg.prepare()?.chart.domain().iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
                },
            };
            cfg.points = Some(vec![u]);
            run_with(cfg, &common.output)
        }
        Command::Sweep { common } => {
            let mut cfg = load(&common.config)?;
            cfg.points = None;
            run_with(cfg, &common.output)
        }
        Command::Compare { common } => {
            let mut cfg = load(&common.config)?;
            if !cfg.methods.iter().any(|m| *m != Method::NumericOracle) {
                cfg.methods.insert(0, Method::General);
            }
            if !cfg.methods.contains(&Method::NumericOracle) {
                cfg.methods.push(Method::NumericOracle);
            }
            run_with(cfg, &common.output)
        }
        Command::Examples { name: None, .. } => {
            for n in BUILTIN_JOBS {
                println!("{n}");
            }
            Ok(())
        }
        Command::Examples { name: Some(name), output } => {
            let cfg = builtin_job(&name).ok_or_else(|| Failure::Config(format!("unknown example '{name}'")))?;
            run_with(cfg, &output)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
