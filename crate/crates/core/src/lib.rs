//! Exact fair-division workbench on piecewise-constant valuations.
//!
//! The crate is `no_std` (with `alloc`). Every verdict about a division is
//! decided in exact rational arithmetic. The grid searches in
//! [`impossibility`] run on scaled integers and use floats only for reported
//! summaries. Enabling the `parallel` feature spreads those searches over a
//! rayon thread pool.

#![cfg_attr(not(feature = "std"), no_std)]
// Errors carry exact rationals (offending values, brackets) by design.
#![allow(clippy::result_large_err)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod algorithms;
pub mod divisions;
pub mod fairness;
pub mod fixtures;
pub mod impossibility;
pub mod linalg;
pub mod measures;
pub mod rational;
pub mod simplex;
pub mod strongkprop;

pub use divisions::{ConnectedDivision, Division, GeneralDivision, SharingMatrix};
pub use fairness::FairnessReport;
pub use measures::{Geometry, Interval, PiecewiseConstantMeasure};
pub use rational::Rational;
