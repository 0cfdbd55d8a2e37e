//! Command-line driver for `hardedge`: the `table1`, `verify`, `mc`, `gap`,
//! `ode`, `sigma`, `fit` and `indicial` subcommands, the Ginibre-product
//! Monte Carlo sampler, and the CSV/JSON/binary output formats.
//!
//! Exit codes: 0 success, 1 numerical or acceptance failure, 2 usage error.

pub mod cli;
pub mod error;
pub mod io;
pub mod mc;
pub mod table1;
pub mod verify;

pub use error::{CliError, CliResult};
