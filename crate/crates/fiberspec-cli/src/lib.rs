//! Configuration, CSV output and self-checks for the `fiberspec` binary.

pub mod config;
pub mod output;
pub mod verify;
