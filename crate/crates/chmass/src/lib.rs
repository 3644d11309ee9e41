//! Command-line runner for the connection, spinor and mass experiments.

pub mod checks;
pub mod commands;
pub mod config;
pub mod exec;
pub mod report;
pub mod sampling;
