//! Stochastic sketch-and-project methods for the Moore-Penrose pseudoinverse.
//!
//! The crate provides dense matrix arithmetic, exact pseudoinverse oracles
//! (Jacobi SVD / eigendecomposition), random sketch distributions, the
//! sketched iterative solvers with a Newton-Schulz baseline and hybrid, plus
//! theoretical convergence-rate evaluators and a closed-form flop model.
//!
//! `no_std` with `alloc`; timing is abstracted behind [`solver::Clock`] so a
//! host environment can supply a wall clock.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod decomp;
pub mod error;
mod fmath;
pub mod flops;
pub mod kron;
pub mod matrix;
pub mod pinv;
pub mod rate;
pub mod sketch;
pub mod solver;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use rate::RateReport;
pub use sketch::{DiscreteSketchDistribution, SketchSample};
pub use solver::{
    Clock, InitRule, Method, NoClock, RunOutcome, SolverConfig, TraceRow,
};
