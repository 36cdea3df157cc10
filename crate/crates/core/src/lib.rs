//! Exact symbolic engine for T-, Y- and Q-system recurrences on Dynkin
//! lattices: Laurent-polynomial evolution from formal initial data, cluster
//! mutation, determinant (minor) realizations, closed-form level-2 solutions,
//! and exact periodicity verification.

pub mod laurent;

pub mod dynkin;
pub mod report;
pub mod tsys;

pub mod cluster;
pub mod determinant;
pub mod explicit2;
pub mod levels01;
pub mod qchar;
pub mod qsystem;
pub mod twisted;
pub mod ymap;
