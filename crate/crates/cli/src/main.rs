use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geomed_cli::{
    run_bench, run_selftest, run_solve, BenchRequest, CliResult, Generator, MethodArg, ModeArg, OutputArg,
    SolveRequest, WeightsSpec,
};

#[derive(Debug, Parser)]
#[command(name = "geomed", version, about = "Geometric median solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance read from a point file.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "practical")]
        mode: ModeArg,
        /// none | last_column | file:<path>
        #[arg(long, default_value = "none")]
        weights: WeightsSpec,
        #[arg(long, value_enum, default_value = "json")]
        output: OutputArg,
    },
    /// Time solvers on generated instances of doubling size; CSV to stdout.
    Bench {
        #[arg(long, value_enum, default_value = "gaussian")]
        gen: Generator,
        #[arg(long, default_value_t = 512)]
        min_n: usize,
        #[arg(long, default_value_t = 8192)]
        max_n: usize,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "practical")]
        mode: ModeArg,
        /// Comma-separated list of methods to time.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "accurate")]
        method: Vec<MethodArg>,
    },
    /// Check the solvers against the reference oracles on small instances.
    Selftest,
}

fn run(cli: Cli) -> CliResult<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Solve {
            input,
            method,
            eps,
            seed,
            mode,
            weights,
            output,
        } => run_solve(
            &SolveRequest {
                input,
                method,
                eps,
                seed,
                mode,
                weights,
                output,
            },
            &mut out,
        ),
        Command::Bench {
            gen,
            min_n,
            max_n,
            dim,
            eps,
            seed,
            mode,
            method,
        } => run_bench(
            &BenchRequest {
                gen,
                min_n,
                max_n,
                dim,
                eps,
                seed,
                mode,
                methods: method,
            },
            &mut out,
        ),
        Command::Selftest => run_selftest(&mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
