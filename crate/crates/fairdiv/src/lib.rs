//! Command-line companion to `fairdiv-core`: JSON scenario and division
//! files, rendered reports and the `fairdiv` binary.

// Input errors wrap core errors, which carry exact rationals.
#![allow(clippy::result_large_err)]

pub mod cli;
pub mod io;
pub mod render;
