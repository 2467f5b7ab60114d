//! Command-line front end: runs the verification pipeline of
//! `periodpoly-core` over weight ranges and writes JSON reports and CSV
//! grids.

pub mod cli;
pub mod config;
pub mod grid;
pub mod pipeline;
pub mod report;
