//! Thin CLI over the scenario pipeline: `run`, `validate`, `presets`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 scenario parse/invariant
//! error, 3 weak-turbulence regime violation without `--override-regime`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fso_qkd::scenario::{
    self, preset_text, run_scenario, summarize, validate_scenario, RunError, Scenario,
};

#[derive(Parser)]
#[command(name = "fso-qkd", version, about = "Free-space optical quantum link calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the CSV artifact here instead of the scenario's output.path
    /// (or stdout when neither is given).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Evaluate sweep points flagged as strong turbulence instead of
    /// refusing.
    #[arg(long, global = true)]
    override_regime: bool,
    /// Seed for the optional Monte Carlo cross-check column.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for the sweep (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario sweep and emit one CSV row per point.
    Run { scenario: PathBuf },
    /// Check a scenario's typed inputs and report the regime per point
    /// without computing rates.
    Validate { scenario: PathBuf },
    /// Print the built-in scenario presets (all, or one by name).
    Presets { name: Option<String> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match &cli.command {
        Command::Run { scenario } => run(scenario, &cli),
        Command::Validate { scenario } => validate(scenario, &cli),
        Command::Presets { name } => presets(name.as_deref()),
    }
}

fn load(path: &PathBuf) -> Result<Scenario, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(1));
        }
    };
    Scenario::parse(&text).map_err(|e| {
        eprintln!("{}:{e}", path.display());
        ExitCode::from(2)
    })
}

fn run(path: &PathBuf, cli: &Cli) -> ExitCode {
    let s = match load(path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let out = match run_scenario(&s, cli.override_regime, cli.seed) {
        Ok(o) => o,
        Err(e @ RunError::Regime { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
        Err(RunError::Scenario(e)) => {
            eprintln!("{}:{e}", path.display());
            return ExitCode::from(2);
        }
    };
    let summary = summarize(&s, &out);
    let target = cli.output.clone().or_else(|| s.output.clone().map(PathBuf::from));
    match target {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, out.csv.as_bytes()) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
            print!("{summary}");
            println!("wrote: {} ({} rows)", p.display(), out.points.len());
        }
        None => {
            print!("{}", out.csv);
            eprint!("{summary}");
        }
    }
    ExitCode::SUCCESS
}

fn validate(path: &PathBuf, cli: &Cli) -> ExitCode {
    let s = match load(path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let report = match validate_scenario(&s) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            return ExitCode::from(2);
        }
    };
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for line in &report.lines {
        println!("{line}");
    }
    println!(
        "{}: {} points, {} strong (schema {})",
        s.name,
        report.lines.len(),
        report.strong_points.len(),
        scenario::CSV_SCHEMA
    );
    if !report.strong_points.is_empty() && !cli.override_regime {
        eprintln!(
            "error: {} sweep point(s) fall in strong turbulence (first at index {}); \
             pass --override-regime to accept",
            report.strong_points.len(),
            report.strong_points[0]
        );
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn presets(name: Option<&str>) -> ExitCode {
    match name {
        Some(n) => match preset_text(n) {
            Some(t) => {
                print!("{t}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown preset {n:?} (available: night, day)");
                ExitCode::from(2)
            }
        },
        None => {
            for n in ["night", "day"] {
                println!("# ---- preset: {n} ----");
                print!("{}", preset_text(n).unwrap());
                println!();
            }
            ExitCode::SUCCESS
        }
    }
}
