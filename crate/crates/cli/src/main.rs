//! `steinzo run` and `steinzo compare`.
//!
//! Exit status: 0 on success, 1 for configuration errors, 2 for failures
//! during a run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use steinzo::experiment::{compare_solvers, load_config, run_experiment};
use steinzo::Error;

#[derive(Parser)]
#[command(name = "steinzo", version, about = "Replicated zeroth-order optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every replicate of one config and write CSV traces.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. `--set iterations=500`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Maximum concurrent replicates (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run two configs on the same problem, seeds, and budget and print a
    /// paired table of final normalized losses.
    Compare {
        #[arg(long = "config-a")]
        config_a: PathBuf,
        #[arg(long = "config-b")]
        config_b: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, set, jobs } => {
            let cfg = load_config(&config, &set)?;
            let summary = run_experiment(&cfg, jobs)?;
            let n = summary.replicates.len();
            let done = summary.completed().count();
            let last = summary.normalized_curve.mean.last().copied().unwrap_or(f64::NAN);
            println!(
                "{}: {done}/{n} replicates completed; mean final normalized loss {last:.6e}; output in {}",
                cfg.solver.name(),
                cfg.output_dir.display()
            );
            if done < n {
                eprintln!("warning: {} replicate(s) diverged, see replicates.csv", n - done);
            }
        }
        Command::Compare {
            config_a,
            config_b,
            jobs,
        } => {
            let a = load_config(&config_a, &[])?;
            let b = load_config(&config_b, &[])?;
            let (cmp, _, _) = compare_solvers(&a, &b, jobs)?;
            print!("{}", cmp.render());
            cmp.write_csv(a.output_dir.join("comparison.csv"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}
