use clap::{Parser, Subcommand, ValueEnum};
use ssnewforms::pipeline::{run_level, run_range, LevelOutput, PipelineError, RunConfig};
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_PARTIAL: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "ssnewforms", version, about = "Newforms of prime level from supersingular isogeny graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest degree of a_2 whose orbits are computed.
    #[arg(long, default_value_t = 6, global = true)]
    gmax: usize,
    /// Coefficients per form (default: the Sturm bound).
    #[arg(long, global = true)]
    ncoeffs: Option<usize>,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Switch::On, global = true)]
    sieve: Switch,
    #[arg(long, default_value_t = 1, global = true)]
    workers: usize,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Newform records, one JSON object per line (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Level reports (default: <out>.report.jsonl, or stderr without --out).
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// One prime level.
    Level { p: u64 },
    /// Every prime level in [a, b].
    Range { a: u64, b: u64 },
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

fn sink(path: Option<&PathBuf>, fallback: Box<dyn Write>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => fallback,
    })
}

fn write_all(cli: &Cli, outputs: &[LevelOutput]) -> io::Result<()> {
    let report_path = cli.report.clone().or_else(|| {
        cli.out.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".report.jsonl");
            PathBuf::from(s)
        })
    });
    let mut out = sink(cli.out.as_ref(), Box::new(io::stdout().lock()))?;
    let mut rep = sink(report_path.as_ref(), Box::new(io::stderr()))?;
    for o in outputs {
        out.write_all(o.record_lines().as_bytes())?;
        rep.write_all(o.report_line().as_bytes())?;
    }
    out.flush()?;
    rep.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cfg = RunConfig {
        gmax: cli.gmax,
        ncoeffs: cli.ncoeffs,
        seed: cli.seed,
        sieve: matches!(cli.sieve, Switch::On),
        workers: cli.workers,
        cache_dir: cli.cache_dir.clone(),
        ..RunConfig::default()
    };
    let result = match cli.command {
        Command::Level { p } => run_level(p, &cfg).map(|o| vec![o]),
        Command::Range { a, b } => run_range(a, b, &cfg),
    };
    match result {
        Ok(outputs) => {
            if let Err(e) = write_all(&cli, &outputs) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_PARTIAL);
            }
            if outputs.iter().any(|o| o.report.partial) {
                ExitCode::from(EXIT_PARTIAL)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ PipelineError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}
