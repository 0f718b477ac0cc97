//! `pdcontact`: generate, solve, verify and export frictional contact
//! problems.
//!
//! Exit codes: 0 success, 1 malformed input or I/O failure, 2 iteration cap
//! reached or a check failed, 3 non-finite iterate.

mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BenchArgs, ExportArgs, GenArgs, SolveArgs, VerifyArgs, EXIT_INPUT};
use manifest::{write_manifest, Run};

#[derive(Debug, Parser)]
#[command(
    name = "pdcontact",
    version,
    about = "Accelerated primal-dual solver for frictional contact"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Where to write the run manifest (default: next to the main output).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a benchmark problem file.
    Gen(GenArgs),
    /// Solve a problem file.
    Solve(SolveArgs),
    /// Check a solution file against its problem.
    Verify(VerifyArgs),
    /// Write the SOCLCP form of a problem as Matrix Market blocks.
    Export(ExportArgs),
    /// Run a benchmark ladder and write a CSV table.
    Bench(BenchArgs),
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Solve(_) => "solve",
            Command::Verify(_) => "verify",
            Command::Export(_) => "export",
            Command::Bench(_) => "bench",
        }
    }

    fn config(&self) -> serde_json::Value {
        let v = match self {
            Command::Gen(a) => serde_json::to_value(a),
            Command::Solve(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
            Command::Export(a) => serde_json::to_value(a),
            Command::Bench(a) => serde_json::to_value(a),
        };
        v.unwrap_or(serde_json::Value::Null)
    }

    fn default_manifest(&self) -> PathBuf {
        match self {
            Command::Gen(a) => with_suffix(&a.out, ".run.json"),
            Command::Solve(a) => with_suffix(&a.out, ".run.json"),
            Command::Verify(a) => with_suffix(&a.solution, ".verify.run.json"),
            Command::Export(a) => a.out.join("run.json"),
            Command::Bench(a) => a.out.join("run.json"),
        }
    }

    fn execute(&self, run: &mut Run) -> anyhow::Result<i32> {
        match self {
            Command::Gen(a) => commands::gen(a, run),
            Command::Solve(a) => commands::solve(a, run),
            Command::Verify(a) => commands::verify(a, run),
            Command::Export(a) => commands::export(a, run),
            Command::Bench(a) => commands::bench(a, run),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors belong to the malformed-input class, not clap's 2
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let mut run = Run::new(cli.command.name(), cli.command.config());
    let (code, message) = match cli.command.execute(&mut run) {
        Ok(code) => (code, None),
        Err(e) => {
            eprintln!("error: {e:#}");
            (commands::error_code(&e), Some(format!("{e:#}")))
        }
    };
    let path = cli.manifest.unwrap_or_else(|| cli.command.default_manifest());
    let manifest = run.finish(code, message);
    let code = match write_manifest(&manifest, &path) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: writing manifest {}: {e:#}", path.display());
            if code == 0 {
                EXIT_INPUT
            } else {
                code
            }
        }
    };
    ExitCode::from(code as u8)
}
