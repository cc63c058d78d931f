//! Simulation harness, file formats and command-line driver for first
//! passage percolation on coalescing random-walk webs.
//!
//! The model itself lives in `rwfpp-core`; this crate adds configuration,
//! CSV/JSON output, Monte Carlo suites and the `rwfpp` executable.

pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod harness;

pub use error::{AppError, Result};
