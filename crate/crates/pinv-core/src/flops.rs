//! Closed-form flop counts per iteration for each method.
//!
//! Conventions: a fused multiply-add counts as 2 flops; the pseudoinverse of a
//! τ×τ symmetric matrix is charged a flat `14τ³` (Jacobi eigendecomposition
//! constant); index-sketch gathers are copies and cost 0 flops, while an
//! explicit (adaptive) sketch pays for its dense products. The counts track
//! leading and first-order terms only; they feed the `flops` trace column and
//! never involve timers.

/// Human-readable description of the counting model, printed by the CLI.
pub const EXPLANATION: &str = "\
Flop counting model (per iteration, A is m x n, sketch width tau):
  * one multiply-add = 2 flops; tau x tau pseudoinverse = 14 tau^3
  * selecting identity columns (index sketches) is a copy: 0 flops;
    an explicit/adaptive sketch pays 2*m*n*tau for the product A*S
  satax:   6*n*m*tau + 2*n*tau^2 + 2*m*tau^2 + 14*tau^3
           (W = At*(A*S), Gram W'W, V = W'X - (AS)', update X - W*(P*V))
  saxas:   4*n^2*tau + 6*n*tau^2 + 18*tau^3   (A symmetric, n x n)
           (M = A*S, Gram M'M, B = S'AS - M'XM, core P*B*P, update + M*core*M')
  project: 4*m^2*tau + 4*m*tau^2 + 14*tau^3
  sax/xa:  4*n*m*tau + 2*n*tau^2 + 2*m*tau^2 + 14*tau^3
  ns:      4*m*n*min(m,n)        (two products, cheaper association)
  inits:   scaled transpose 3*m*n; scaled square 2*n^3 + n^2; ns 3*m*n
  hybrid:  satax iterations, then 2*m*n^2 + n*m for the rescale X/||XA||_F,
           then ns iterations
Residual evaluation is excluded from both the flop and time columns.";

pub fn satax_step(m: usize, n: usize, tau: usize, explicit_sketch: bool) -> u64 {
    let (m, n, t) = (m as u64, n as u64, tau as u64);
    let gather = if explicit_sketch { 2 * m * n * t } else { 0 };
    6 * n * m * t + 2 * n * t * t + 2 * m * t * t + 14 * t * t * t + gather
}

pub fn saxas_step(n: usize, tau: usize, explicit_sketch: bool) -> u64 {
    let (n, t) = (n as u64, tau as u64);
    let gather = if explicit_sketch {
        2 * n * n * t + 2 * n * t * t
    } else {
        0
    };
    4 * n * n * t + 6 * n * t * t + 18 * t * t * t + gather
}

pub fn project_step(m: usize, tau: usize) -> u64 {
    let (m, t) = (m as u64, tau as u64);
    4 * m * m * t + 4 * m * t * t + 14 * t * t * t
}

pub fn sax_step(m: usize, n: usize, tau: usize) -> u64 {
    let (m, n, t) = (m as u64, n as u64, tau as u64);
    4 * n * m * t + 2 * n * t * t + 2 * m * t * t + 14 * t * t * t
}

pub fn xa_step(m: usize, n: usize, tau: usize) -> u64 {
    sax_step(m, n, tau)
}

pub fn newton_schulz_step(m: usize, n: usize) -> u64 {
    let (m, n) = (m as u64, n as u64);
    4 * m * n * m.min(n)
}

pub fn init_scaled_transpose(m: usize, n: usize) -> u64 {
    3 * m as u64 * n as u64
}

pub fn init_scaled_square(n: usize) -> u64 {
    let n = n as u64;
    2 * n * n * n + n * n
}

pub fn init_newton_schulz(m: usize, n: usize) -> u64 {
    3 * m as u64 * n as u64
}

pub fn hybrid_rescale(m: usize, n: usize) -> u64 {
    let (m, n) = (m as u64, n as u64);
    2 * m * n * n + n * m
}
