//! File formats and subcommand logic behind the `byzmac` binary.

pub mod commands;
pub mod io;
