//! Theoretical convergence rates and certification for discrete sketch
//! distributions.
//!
//! For the normal-equation method the expected one-step contraction of
//! E‖X_k − A†‖² is governed by ρ = 1 − λ_min⁺(AᵀA · E[H_S] · AᵀA) with
//! H_S = S(SᵀAᵀAAᵀAS)†Sᵀ. For the symmetric two-sided method the operator
//! Z = AS(SᵀA²S)†SᵀA acts on both sides, and 1 − λ_min⁺(E[Z⊗Z]) upper-bounds
//! the rate. These routines form dense expectations, so they are guarded by
//! dimension caps and meant for verification at small sizes.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kron::kron;
use crate::matrix::DenseMatrix;
use crate::pinv::{self, DEFAULT_REL_TOL, SYMMETRY_TOL};
use crate::sketch::{right_apply, DiscreteSketchDistribution, SketchSample};

/// Default dimension cap for the n×n (or m×m) dense expectations.
pub const DEFAULT_RATE_CAP: usize = 200;
/// Default dimension cap for the n²×n² Kronecker expectation.
pub const DEFAULT_KRON_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// Contraction factor ρ ∈ [0, 1]; for the symmetric method this is the
    /// Kronecker upper bound (the note says so).
    pub rho_exact: f64,
    /// Trace-based upper bound when one applies.
    pub rho_bound: Option<f64>,
    /// True when convergence (ρ < 1) is guaranteed for the distribution.
    pub certified: bool,
    pub spectrum_note: String,
}

fn clamp_rate(rho: f64) -> Result<f64> {
    if !(-1e-10..=1.0 + 1e-10).contains(&rho) {
        return Err(Error::InvalidConfig("computed rate outside [0, 1]"));
    }
    Ok(rho.clamp(0.0, 1.0))
}

/// ρ = 1 − λ_min⁺(AᵀA · E[H_S] · AᵀA) with the expectation taken over the
/// discrete distribution. Dense in n; refuses m or n above `cap`.
pub fn satax_rate_exact(
    a: &DenseMatrix,
    dist: &DiscreteSketchDistribution,
    cap: usize,
) -> Result<RateReport> {
    let (m, n) = (a.rows(), a.cols());
    if m > cap || n > cap {
        return Err(Error::AnalysisCap { dim: m.max(n), cap });
    }
    let mut e_h = DenseMatrix::zeros(n, n);
    for (s, &p) in dist.samples().iter().zip(dist.probs()) {
        s.validate(n)?;
        let m1 = right_apply(a, s); // AS
        let w = a.tr_mul(&m1); // AᵀAS
        let g = w.tr_mul(&w);
        let pg = pinv::pinv_psd(&g, DEFAULT_REL_TOL)?;
        let sd = s.materialize(n);
        e_h = e_h.add(&sd.mul(&pg).mul(&sd.transpose()).scale(p));
    }
    let ata = a.tr_mul(a);
    let z = ata.mul(&e_h).mul(&ata).symmetrize();
    let lam = pinv::lambda_min_plus(&z, DEFAULT_REL_TOL)?;
    let rho = clamp_rate(1.0 - lam)?;
    Ok(RateReport {
        rho_exact: rho,
        rho_bound: None,
        certified: rho < 1.0,
        spectrum_note: alloc::format!(
            "lambda_min_plus(AtA E[H] AtA) = {lam:.6e} over {} sketches",
            dist.len()
        ),
    })
}

/// Trace bound 1 − λ_min⁺(𝕊ᵀ(AᵀA)²𝕊)/Tr(𝕊ᵀ(AᵀA)²𝕊), valid under
/// trace-proportional ("convenient") probabilities; 𝕊 stacks the sketches
/// column-wise.
pub fn satax_rate_bound(a: &DenseMatrix, s_stack: &DenseMatrix) -> Result<f64> {
    if s_stack.rows() != a.cols() {
        return Err(Error::ShapeMismatch {
            context: "rate bound stack",
            left: (a.cols(), 0),
            right: (s_stack.rows(), s_stack.cols()),
        });
    }
    let g = a.tr_mul(a);
    let gs = g.mul(s_stack); // AᵀA 𝕊
    let b = gs.tr_mul(&gs).symmetrize(); // 𝕊ᵀ(AᵀA)²𝕊
    let tr = b.trace();
    if tr <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let lam = pinv::lambda_min_plus(&b, DEFAULT_REL_TOL)?;
    clamp_rate(1.0 - lam / tr)
}

/// Upper bound 1 − λ_min⁺(E[Z⊗Z]) for the symmetric method, plus the rank
/// certificate. The Kronecker expectation is n²×n², hence the small cap.
pub fn saxas_rate_bound(
    a: &DenseMatrix,
    dist: &DiscreteSketchDistribution,
    cap: usize,
) -> Result<RateReport> {
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    if n > cap {
        return Err(Error::AnalysisCap { dim: n, cap });
    }
    let mut e_zz = DenseMatrix::zeros(n * n, n * n);
    for (s, &p) in dist.samples().iter().zip(dist.probs()) {
        s.validate(n)?;
        let m1 = right_apply(a, s);
        let g = m1.tr_mul(&m1);
        let pg = pinv::pinv_psd(&g, DEFAULT_REL_TOL)?;
        let z = m1.mul(&pg).mul(&m1.transpose()).symmetrize();
        e_zz = e_zz.add(&kron(&z, &z).scale(p));
    }
    let lam = pinv::lambda_min_plus(&e_zz.symmetrize(), DEFAULT_REL_TOL)?;
    let bound = clamp_rate(1.0 - lam)?;
    let certified =
        saxas_convergence_certificate(a, dist.samples(), cap)? && bound < 1.0;
    Ok(RateReport {
        rho_exact: bound,
        rho_bound: Some(bound),
        certified,
        spectrum_note: alloc::format!(
            "Kronecker upper bound; lambda_min_plus(E[Z kron Z]) = {lam:.6e}"
        ),
    })
}

/// Convergence certificate for the symmetric method: stacking the matrices
/// Sᵢᵀ⊗Sᵢᵀ into 𝕊, convergence is guaranteed iff
/// rank(𝕊·(A⊗A)) = rank(A⊗A).
pub fn saxas_convergence_certificate(
    a: &DenseMatrix,
    samples: &[SketchSample],
    cap: usize,
) -> Result<bool> {
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    if n > cap {
        return Err(Error::AnalysisCap { dim: n, cap });
    }
    if samples.is_empty() {
        return Err(Error::BadDistribution);
    }
    let blocks: Vec<DenseMatrix> = samples
        .iter()
        .map(|s| {
            s.validate(n)?;
            let st = s.materialize(n).transpose();
            Ok(kron(&st, &st))
        })
        .collect::<Result<_>>()?;
    let total_rows: usize = blocks.iter().map(DenseMatrix::rows).sum();
    let mut stack = DenseMatrix::zeros(total_rows, n * n);
    let mut offset = 0;
    for b in &blocks {
        for j in 0..b.cols() {
            for i in 0..b.rows() {
                stack.set(offset + i, j, b.get(i, j));
            }
        }
        offset += b.rows();
    }
    let aa = kron(a, a);
    let lhs = stack.mul(&aa);
    let rank_lhs = pinv::spectral_info(&lhs, DEFAULT_REL_TOL)?.rank;
    let rank_aa = pinv::spectral_info(&aa, DEFAULT_REL_TOL)?.rank;
    Ok(rank_lhs == rank_aa)
}
