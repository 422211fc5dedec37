use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use psgrowth_lab::report::RunStats;
use psgrowth_lab::{run, ExperimentConfig, ExperimentKind, LabError};

#[derive(Parser)]
#[command(name = "psgrowth", version, about = "Growth, boundary and density experiments on Cayley graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Maximum number of stored elements.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall-clock time and peak memory in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Subcommand)]
enum Command {
    Growth,
    NormalSubgroup,
    Grigorchuk,
    ShadowLemma,
    Spr,
    Horoboundary,
    Poincare,
    Density,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::Growth => ExperimentKind::Growth,
            Command::NormalSubgroup => ExperimentKind::NormalSubgroup,
            Command::Grigorchuk => ExperimentKind::Grigorchuk,
            Command::ShadowLemma => ExperimentKind::ShadowLemma,
            Command::Spr => ExperimentKind::Spr,
            Command::Horoboundary => ExperimentKind::Horoboundary,
            Command::Poincare => ExperimentKind::Poincare,
            Command::Density => ExperimentKind::Density,
        }
    }
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, LabError> {
    let kind = cli.command.kind();
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(r) = cli.radius {
        cfg.radius = Some(r);
    }
    if let Some(b) = cli.budget {
        cfg.budget.max_elements = b;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    let start = Instant::now();
    let mut report = run(kind, &cfg)?;
    if cli.timing {
        report.stats = Some(RunStats {
            wall_seconds: start.elapsed().as_secs_f64(),
            peak_rss_kib: peak_rss_kib(),
        });
    }
    match cli.format {
        Format::Json => {
            let p = report.write_json(&out)?;
            println!("{}", p.display());
        }
        Format::Csv => {
            for p in report.write_csv(&out)? {
                println!("{}", p.display());
            }
        }
    }
    for v in &report.verdicts {
        println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.claim);
    }
    Ok(if report.all_passed() { 0 } else { 4 })
}
