//! Command implementations and the HTTP service behind the `greenfront` binary.

pub mod commands;
pub mod config;
pub mod server;
