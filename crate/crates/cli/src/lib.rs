//! Command-line front end: the polynomial grammar, report types and the `analyze`,
//! `membership` and `corpus` commands.

pub mod commands;
pub mod parser;
pub mod report;
