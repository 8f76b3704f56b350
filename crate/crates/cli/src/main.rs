use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use leviflat_cli::{run, threads_from_env, CliError, Command};

/// J-complex disc families attached to totally real tori.
#[derive(Parser)]
#[command(name = "leviflat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one disc with u(1) = iτ and write its report.
    Solve {
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve the family over the τ grid and write the mesh and the report.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the verification suite and write its report.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute the family of a stored sweep report and write its mesh.
    Export {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cmd = match cli.command {
        Cmd::Solve { tau, config } => Command::Solve { tau, config },
        Cmd::Sweep { config } => Command::Sweep { config },
        Cmd::Verify { config } => Command::Verify { config },
        Cmd::Export { report, out } => Command::Export { report, out },
    };
    match execute(&cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("leviflat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cmd: &Command) -> Result<u8, CliError> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Schema(format!("{}: {e}", leviflat_cli::THREADS_ENV)))?;
    }
    let outcome = run(cmd)?;
    for check in &outcome.report.checks {
        println!("{}", check.line());
    }
    for path in &outcome.written {
        println!("wrote {}", path.display());
    }
    let code = outcome.exit_code();
    if code != 0 {
        let failed = outcome.report.failures().count();
        eprintln!("leviflat: {failed} of {} checks failed", outcome.report.checks.len());
    }
    Ok(code as u8)
}
