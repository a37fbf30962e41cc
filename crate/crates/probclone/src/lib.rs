//! File formats and command-line front end for `probclone-core`.
//!
//! Exit statuses: 0 success or independent, 1 input error, 2 dependent or
//! infeasible verdict, 3 build infeasibility.

pub mod commands;
pub mod error;
pub mod files;

pub use commands::{run, Cli, Command};
pub use error::CliError;
pub use files::{load_machine, load_states, save_machine, save_states, MachineFile, StateSetFile};
