//! File formats, configuration, batch processing and the command-line front end.

pub mod batch;
pub mod cli;
pub mod config;
pub mod io;
pub mod pipeline;
