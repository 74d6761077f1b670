//! Standard-library companion to `cfmetric-core`: a rayon-backed
//! executor, CSV/JSON artifacts, config files and the `cfmetric` CLI.

pub mod artifact;
pub mod cli;
pub mod config;
mod exec;
pub mod parse;

pub use exec::RayonExecutor;
