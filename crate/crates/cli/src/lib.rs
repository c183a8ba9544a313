//! Command-line front end: instance files, run reports and trace files.

pub mod commands;
pub mod instance;
