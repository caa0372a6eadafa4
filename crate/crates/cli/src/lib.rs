//! File I/O, serialization, and subcommands behind the `geomed` binary.

pub mod commands;
pub mod error;
pub mod input;
pub mod output;

pub use commands::{
    bench, run_bench, run_selftest, run_solve, solve, solve_points, BenchRequest, BenchRow, Generator, MethodArg,
    ModeArg, OutputArg, SolveRequest,
};
pub use error::{CliError, CliResult};
pub use input::{parse_points, parse_points_str, WeightsSpec};
pub use output::{fmt17, write_points, SolveReport};
