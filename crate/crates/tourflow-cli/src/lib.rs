//! Command-line front end over the flow-network analysis library: loads the
//! CSV inputs described by a run configuration, aggregates the requested
//! year window, and writes deterministic JSON/CSV reports.

pub mod cli;
pub mod config;
pub mod report;

pub use cli::run;
pub use config::RunConfig;
