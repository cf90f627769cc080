//! Library surface of the CLI so integration tests share the exact
//! command wiring the binary uses.

pub mod args;
pub mod artifacts;
pub mod commands;
pub mod context;
pub mod report;

pub use args::*;
