//! Library surface of the `tsys-lab` front end: JSON config parsing and the
//! built-in verification suite registry (one suite per acceptance check,
//! plus a few named shortcuts).

pub mod config;
pub mod suites;
