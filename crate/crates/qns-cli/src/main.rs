use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qns_cli::config::RunConfig;
use qns_cli::runner::{run, RunError, RunOptions};
use qns_cli::verify::run_suite;
use qns_cli::exit_codes;

/// Qudit noise spectroscopy: comb forward models and spectral inversion.
#[derive(Parser)]
#[command(name = "qns", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config: simulate or ingest measurements, invert, and
    /// write spectra CSVs plus a report.
    Run {
        /// Path to the TOML run configuration.
        config: PathBuf,
        /// Ingest measured records from this CSV instead of simulating.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Output directory (default: config's out_dir, else "out").
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the forward phase.
        #[arg(long)]
        threads: Option<usize>,
        /// Evaluate the measurement integrals with the closed-form
        /// Poissonian path (antimony-w with all-Poissonian truth only).
        #[arg(long)]
        fast_poissonian: bool,
    },
    /// Run the scenario-scoped property suite and report pass/fail lines.
    Verify {
        /// Path to the TOML run configuration.
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, records, out, threads, fast_poissonian } => {
            cmd_run(config, records, out, threads, fast_poissonian)
        }
        Command::Verify { config } => cmd_verify(config),
    };
    ExitCode::from(code as u8)
}

fn cmd_run(
    config: PathBuf,
    records: Option<PathBuf>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    fast_poissonian: bool,
) -> i32 {
    let parsed = match RunConfig::load(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return exit_codes::CONFIG_ERROR;
        }
    };
    let prep = match parsed.prepare() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return exit_codes::CONFIG_ERROR;
        }
    };
    for w in &prep.sequence_warnings {
        eprintln!("warning: {w}");
    }
    let out_dir = out
        .or(parsed.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let threads = threads.unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    });
    let opts = RunOptions { out_dir: out_dir.clone(), threads, fast_poissonian, records_override: records };
    match run(&prep, &opts) {
        Ok(artifacts) => {
            println!(
                "ok: {} rounds x {} sets -> {} (condition {:.3e})",
                artifacts.grid.len(),
                prep.model.n_sets(),
                out_dir.display(),
                artifacts.result.condition,
            );
            exit_codes::OK
        }
        Err(RunError::Config(e)) => {
            eprintln!("{e}");
            exit_codes::CONFIG_ERROR
        }
        Err(e @ (RunError::Numerical(_) | RunError::Io(_))) => {
            eprintln!("{e}");
            match e {
                RunError::Numerical(_) => exit_codes::NUMERICAL_ERROR,
                _ => exit_codes::CONFIG_ERROR,
            }
        }
    }
}

fn cmd_verify(config: PathBuf) -> i32 {
    let parsed = match RunConfig::load(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return exit_codes::CONFIG_ERROR;
        }
    };
    let prep = match parsed.prepare() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return exit_codes::CONFIG_ERROR;
        }
    };
    let results = run_suite(&prep, None);
    let mut failures = Vec::new();
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:<32} {}", r.name, r.detail);
        if !r.passed {
            failures.push(r.name);
        }
    }
    if failures.is_empty() {
        println!("all {} properties passed", results.len());
        exit_codes::OK
    } else {
        eprintln!("failed properties: {}", failures.join(", "));
        exit_codes::VERIFY_FAILED
    }
}
