//! Command-line front end of `relage-core`: system files, JSON reports,
//! CSV curves and the reproduction registry.

pub mod cli;
pub mod report;
pub mod reproduce;
pub mod spec;

pub use cli::run;
