//! Library surface of the command-line tool, split out so the integration
//! tests can exercise parsing and rendering directly.

pub mod commands;
pub mod model_file;
pub mod report;
