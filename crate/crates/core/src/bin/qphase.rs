use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qphase::monte_carlo::{Execution, DEFAULT_SEED};
use qphase::report::{
    density_report, run_report, Format, RunError, RunOverrides, DEFAULT_DENSITY_BINS, DEFAULT_DENSITY_SAMPLES,
};
use qphase::verify::{run_verify, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "qphase",
    version,
    about = "Simulate qubits whose component phases are unknown"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(clap::Args)]
struct Exec {
    /// Worker threads; 1 runs sequentially. Output does not depend on this.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file and print its report.
    Run {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[command(flatten)]
        exec: Exec,
    },
    /// Histogram of P(0) for the equal superposition after M, against the arcsine pdf.
    Density {
        #[arg(long, default_value_t = DEFAULT_DENSITY_SAMPLES, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_DENSITY_BINS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        bins: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[command(flatten)]
        exec: Exec,
    },
    /// Run the randomized property sweeps.
    Verify {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Inject a non-unitary gate into the unitarity sweep.
        #[arg(long, hide = true)]
        corrupt_gate: bool,
    },
}

/// Runs `f` with the requested parallelism.
fn with_threads<T: Send>(exec: &Exec, f: impl FnOnce(Execution) -> T + Send) -> Result<T, String> {
    match exec.threads {
        None => Ok(f(Execution::Parallel)),
        Some(1) => Ok(f(Execution::Sequential)),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map(|pool| pool.install(|| f(Execution::Parallel)))
            .map_err(|e| e.to_string()),
    }
}

fn emit(result: Result<Result<String, RunError>, String>) -> ExitCode {
    match result {
        Ok(Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            for line in e.to_string().lines() {
                eprintln!("error: {line}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Run {
            file,
            seed,
            samples,
            format,
            exec,
        } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let overrides = RunOverrides { seed, samples };
            emit(with_threads(&exec, |x| {
                run_report(&text, overrides, x).map(|r| r.render(format.into()))
            }))
        }
        Command::Density {
            samples,
            bins,
            seed,
            format,
            exec,
        } => emit(with_threads(&exec, |x| {
            density_report(samples, bins as usize, seed, x).map(|r| r.render(format.into()))
        })),
        Command::Verify {
            trials,
            seed,
            corrupt_gate,
        } => {
            let results = run_verify(&VerifyOptions {
                trials: trials as usize,
                seed,
                corrupt_gate,
            });
            let mut failed = Vec::new();
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!(
                    "{status} {} trials={} worst={:.3e} tolerance={:.0e}",
                    r.name, r.trials, r.worst, r.tolerance
                );
                if !r.passed {
                    failed.push(r.name);
                }
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: failing properties: {}", failed.join(", "));
                ExitCode::from(1)
            }
        }
    }
}
