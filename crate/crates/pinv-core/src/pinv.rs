//! Exact pseudoinverse oracles and spectral helpers.
//!
//! `pinv_exact` is the reference the stochastic solvers are measured against;
//! `pinv_psd` handles the small τ×τ Gram factors inside each sketched update.
//! Rank decisions are relative: a singular value counts as zero when it is at
//! most `rel_tol` times the largest one.

use crate::decomp::{self, SpectralInfo};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Default relative threshold for treating singular values as zero.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Relative asymmetry tolerance for inputs that must be symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Moore-Penrose pseudoinverse via full SVD: `A† = V Σ† Uᵀ`.
pub fn pinv_exact(a: &DenseMatrix, rel_tol: f64) -> Result<DenseMatrix> {
    if a.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let svd = decomp::svd(a)?;
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let threshold = rel_tol * smax;
    // V Σ† Uᵀ with σ ≤ threshold inverted to zero.
    let k = svd.singular_values.len();
    let mut vs = svd.v.clone();
    for j in 0..k {
        let s = svd.singular_values[j];
        let inv = if s > threshold { 1.0 / s } else { 0.0 };
        for v in vs.col_mut(j) {
            *v *= inv;
        }
    }
    Ok(vs.mul(&svd.u.transpose()))
}

/// Pseudoinverse of a small symmetric PSD matrix via Jacobi eigendecomposition.
///
/// Eigenvalues at or below `rel_tol * λ_max` are zeroed. The result is
/// symmetric by construction.
pub fn pinv_psd(g: &DenseMatrix, rel_tol: f64) -> Result<DenseMatrix> {
    if g.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if !g.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    let eig = decomp::sym_eig(g)?;
    let lmax = eig.values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    if lmax == 0.0 {
        return Ok(DenseMatrix::zeros(g.rows(), g.cols()));
    }
    let threshold = rel_tol * lmax;
    let mut ql = eig.vectors.clone();
    for j in 0..eig.values.len() {
        let lam = eig.values[j];
        let inv = if lam > threshold { 1.0 / lam } else { 0.0 };
        for v in ql.col_mut(j) {
            *v *= inv;
        }
    }
    Ok(ql.mul(&eig.vectors.transpose()).symmetrize())
}

/// Smallest eigenvalue strictly above `rel_tol * λ_max` of a symmetric PSD
/// matrix. Returns 0 for the zero matrix; callers treat that as rate ρ = 1.
pub fn lambda_min_plus(g: &DenseMatrix, rel_tol: f64) -> Result<f64> {
    if !g.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    let eig = decomp::sym_eig(g)?;
    let lmax = eig.values.first().copied().unwrap_or(0.0);
    if lmax <= 0.0 {
        return Ok(0.0);
    }
    let threshold = rel_tol * lmax;
    Ok(eig
        .values
        .iter()
        .copied()
        .filter(|&v| v > threshold)
        .fold(lmax, f64::min))
}

/// Frobenius residual `‖AXA − A‖_F`, evaluated as `A(XA) − A`.
pub fn residual(a: &DenseMatrix, x: &DenseMatrix) -> Result<f64> {
    if x.rows() != a.cols() || x.cols() != a.rows() {
        return Err(Error::ShapeMismatch {
            context: "residual",
            left: (a.rows(), a.cols()),
            right: (x.rows(), x.cols()),
        });
    }
    let xa = x.mul(a);
    Ok(a.mul(&xa).sub(a).frobenius_norm())
}

/// Singular-value summary of `a` with relative rank threshold.
pub fn spectral_info(a: &DenseMatrix, rel_tol: f64) -> Result<SpectralInfo> {
    let svd = decomp::svd(a)?;
    Ok(SpectralInfo::from_values(svd.singular_values, rel_tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) {
        assert!(
            a.sub(b).frobenius_norm() <= tol,
            "difference {} exceeds {}",
            a.sub(b).frobenius_norm(),
            tol
        );
    }

    #[test]
    fn pinv_diag() {
        let a = DenseMatrix::diag(&[2.0, 0.0]);
        let p = pinv_exact(&a, DEFAULT_REL_TOL).unwrap();
        assert_close(&p, &DenseMatrix::diag(&[0.5, 0.0]), 1e-14);
    }

    #[test]
    fn pinv_identity() {
        let p = pinv_exact(&DenseMatrix::identity(3), DEFAULT_REL_TOL).unwrap();
        assert_close(&p, &DenseMatrix::identity(3), 1e-14);
    }

    #[test]
    fn pinv_rank_one_rectangular() {
        // A = [[1,2],[2,4],[3,6]] has rank 1; A† = (1/70)[[1,2,3],[2,4,6]],
        // frozen from A† = Aᵀ(AAᵀ)† with the rank-1 eigenpair worked by hand.
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]).unwrap();
        let p = pinv_exact(&a, DEFAULT_REL_TOL).unwrap();
        let expect = DenseMatrix::from_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]])
            .unwrap()
            .scale(1.0 / 70.0);
        assert_close(&p, &expect, 1e-12);
        // P1 holds.
        assert_close(&a.mul(&p).mul(&a), &a, 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn pinv_empty_errors() {
        assert_eq!(
            pinv_exact(&DenseMatrix::zeros(0, 3), DEFAULT_REL_TOL),
            Err(Error::EmptyMatrix)
        );
    }

    #[test]
    fn pinv_psd_examples() {
        let p = pinv_psd(&DenseMatrix::diag(&[4.0, 0.0]), DEFAULT_REL_TOL).unwrap();
        assert_close(&p, &DenseMatrix::diag(&[0.25, 0.0]), 1e-14);

        let z = pinv_psd(&DenseMatrix::zeros(3, 3), DEFAULT_REL_TOL).unwrap();
        assert_close(&z, &DenseMatrix::zeros(3, 3), 0.0);

        // ones(2x2) is rank-1 PSD with eigenpair (2, (1,1)/sqrt(2)).
        let ones = DenseMatrix::from_vec(2, 2, alloc::vec![1.0; 4]).unwrap();
        let p = pinv_psd(&ones, DEFAULT_REL_TOL).unwrap();
        assert_close(&p, &ones.scale(0.25), 1e-13);
        assert_close(&ones.mul(&p).mul(&ones), &ones, 1e-12);
    }

    #[test]
    fn pinv_psd_rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(pinv_psd(&a, DEFAULT_REL_TOL), Err(Error::NotSymmetric));
    }

    #[test]
    fn lambda_min_plus_examples() {
        let g = DenseMatrix::diag(&[3.0, 1.0, 0.0]);
        assert!((lambda_min_plus(&g, 1e-12).unwrap() - 1.0).abs() < 1e-14);
        assert!((lambda_min_plus(&DenseMatrix::identity(4), 1e-12).unwrap() - 1.0).abs() < 1e-14);
        // 2e-15 < 1e-12 * 5 is treated as zero.
        let g = DenseMatrix::diag(&[5.0, 2e-15, 0.0]);
        assert!((lambda_min_plus(&g, 1e-12).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(lambda_min_plus(&DenseMatrix::zeros(2, 2), 1e-12), Ok(0.0));
    }

    #[test]
    fn residual_examples() {
        let a = DenseMatrix::diag(&[2.0, 0.0]);
        let p = pinv_exact(&a, DEFAULT_REL_TOL).unwrap();
        assert!(residual(&a, &p).unwrap() <= 1e-10 * a.frobenius_norm());
        assert!((residual(&a, &DenseMatrix::zeros(2, 2)).unwrap() - a.frobenius_norm()).abs() < 1e-14);
        // X = diag(1,0): AXA = diag(4,0), residual = 2.
        let x = DenseMatrix::diag(&[1.0, 0.0]);
        assert!((residual(&a, &x).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn residual_shape_mismatch() {
        let a = DenseMatrix::zeros(3, 2);
        let x = DenseMatrix::zeros(3, 2);
        assert!(residual(&a, &x).is_err());
    }
}
