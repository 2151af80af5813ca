//! File formats, generators and trace output for the pinv-core solvers.

pub mod clock;
pub mod gen;
pub mod libsvm;
pub mod mm;
pub mod trace;
