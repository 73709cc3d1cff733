//! Command-line front end and governor daemon for `deon-core`.

pub mod cli;
pub mod daemon;
pub mod input;
pub mod report;

pub use cli::run;
