//! Library surface of the command-line front end: the expression grammar,
//! problem-spec files, check execution and report types. The binary in
//! `main.rs` is a thin wrapper over these.

pub mod commands;
pub mod expr;
pub mod report;
pub mod specfile;
