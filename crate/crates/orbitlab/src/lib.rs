//! Command-line front end and parallel experiment runner for `orbitlab-core`.

pub mod cli;
pub mod io;
pub mod runner;

pub use cli::{run_cli, ExitCode};
pub use runner::{run_parallel, Metadata, RunError};
