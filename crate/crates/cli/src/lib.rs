//! Command implementations and JSON schemas behind the `troplab` binary.

pub mod commands;
pub mod json;
