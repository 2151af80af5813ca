//! Dense decompositions: one-sided Jacobi SVD and cyclic Jacobi symmetric
//! eigendecomposition.
//!
//! Jacobi methods were chosen for their high relative accuracy on small
//! singular values, which matters because the exact pseudoinverse serves as
//! the oracle against which the stochastic methods are judged. Everything here
//! targets desk-scale problems (a few thousand rows at most).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::matrix::DenseMatrix;

const MAX_SWEEPS: usize = 60;
const JACOBI_TOL: f64 = 1e-15;

/// Thin SVD `A = U diag(s) Vᵀ` with `s` sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

/// Symmetric eigendecomposition `A = Q diag(λ) Qᵀ`, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// Spectrum summary with a relative rank threshold.
#[derive(Debug, Clone)]
pub struct SpectralInfo {
    /// Singular values (or eigenvalue magnitudes), descending.
    pub values: Vec<f64>,
    /// Number of values strictly above `zero_threshold`.
    pub rank: usize,
    pub zero_threshold: f64,
}

impl SpectralInfo {
    pub fn from_values(mut values: Vec<f64>, rel_tol: f64) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let max = values.first().copied().unwrap_or(0.0);
        let zero_threshold = rel_tol * max;
        let rank = values.iter().filter(|&&v| v > zero_threshold).count();
        Self {
            values,
            rank,
            zero_threshold,
        }
    }
}

/// Thin SVD via one-sided Jacobi on the tall orientation.
pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    if a.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if a.rows() >= a.cols() {
        one_sided_jacobi(a)
    } else {
        let t = one_sided_jacobi(&a.transpose())?;
        Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        })
    }
}

fn one_sided_jacobi(a: &DenseMatrix) -> Result<Svd> {
    let m = a.rows();
    let n = a.cols();
    let mut b = a.clone();
    let mut v = DenseMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = column_moments(&b, p, q);
                if gamma == 0.0 || gamma * gamma <= JACOBI_TOL * JACOBI_TOL * alpha * beta {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + fmath::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + fmath::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / fmath::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_cols(&mut b, p, q, c, s);
                rotate_cols(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; normalize to get U.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| fmath::sqrt(b.col(j).iter().map(|x| x * x).sum()))
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = DenseMatrix::zeros(m, n);
    let mut vs = DenseMatrix::zeros(n, n);
    let mut singular_values = vec![0.0; n];
    for (k, &j) in order.iter().enumerate() {
        singular_values[k] = norms[j];
        vs.col_mut(k).copy_from_slice(v.col(j));
        if norms[j] > 0.0 {
            let inv = 1.0 / norms[j];
            for (dst, &src) in u.col_mut(k).iter_mut().zip(b.col(j)) {
                *dst = src * inv;
            }
        }
        // Columns with zero singular value keep a zero U column; they are
        // never inverted downstream.
    }
    Ok(Svd {
        u,
        singular_values,
        v: vs,
    })
}

fn column_moments(b: &DenseMatrix, p: usize, q: usize) -> (f64, f64, f64) {
    let cp = b.col(p);
    let cq = b.col(q);
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = 0.0;
    for i in 0..cp.len() {
        alpha += cp[i] * cp[i];
        beta += cq[i] * cq[i];
        gamma += cp[i] * cq[i];
    }
    (alpha, beta, gamma)
}

fn rotate_cols(b: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let rows = b.rows();
    for i in 0..rows {
        let bp = b.get(i, p);
        let bq = b.get(i, q);
        b.set(i, p, c * bp - s * bq);
        b.set(i, q, s * bp + c * bq);
    }
}

/// Cyclic Jacobi eigendecomposition for symmetric input.
///
/// Symmetry is the caller's responsibility; public entry points check it.
pub fn sym_eig(a: &DenseMatrix) -> Result<SymEig> {
    if a.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if a.rows() != a.cols() {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    let mut w = a.symmetrize();
    let mut q = DenseMatrix::identity(n);

    let scale = w.max_abs();
    if scale == 0.0 {
        return Ok(SymEig {
            values: vec![0.0; n],
            vectors: q,
        });
    }

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for j in 0..n {
            for i in 0..j {
                off += w.get(i, j) * w.get(i, j);
            }
        }
        if fmath::sqrt(2.0 * off) <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for qi in (p + 1)..n {
                let apq = w.get(p, qi);
                if fmath::abs(apq) <= 1e-300 {
                    continue;
                }
                let app = w.get(p, p);
                let aqq = w.get(qi, qi);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + fmath::hypot(1.0, theta))
                } else {
                    1.0 / (theta - fmath::hypot(1.0, theta))
                };
                let c = 1.0 / fmath::sqrt(1.0 + t * t);
                let s = t * c;
                apply_jacobi_rotation(&mut w, p, qi, c, s);
                rotate_cols(&mut q, p, qi, c, s);
            }
        }
    }

    let mut values: Vec<f64> = (0..n).map(|i| w.get(i, i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    let vectors = q.gather_cols(&order);
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(SymEig { values, vectors })
}

fn apply_jacobi_rotation(w: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = w.rows();
    let app = w.get(p, p);
    let aqq = w.get(q, q);
    let apq = w.get(p, q);
    let new_pp = c * c * app - 2.0 * s * c * apq + s * s * aqq;
    let new_qq = s * s * app + 2.0 * s * c * apq + c * c * aqq;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = w.get(k, p);
        let akq = w.get(k, q);
        let rp = c * akp - s * akq;
        let rq = s * akp + c * akq;
        w.set(k, p, rp);
        w.set(p, k, rp);
        w.set(k, q, rq);
        w.set(q, k, rq);
    }
    w.set(p, p, new_pp);
    w.set(q, q, new_qq);
    w.set(p, q, 0.0);
    w.set(q, p, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn random_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(m, n, |_, _| uniform(&mut rng))
    }

    fn reconstruct(svd: &Svd) -> DenseMatrix {
        let k = svd.singular_values.len();
        let mut us = svd.u.clone();
        for j in 0..k {
            let s = svd.singular_values[j];
            for v in us.col_mut(j) {
                *v *= s;
            }
        }
        us.mul(&svd.v.transpose())
    }

    #[test]
    fn svd_reconstructs_random_tall_and_wide() {
        for (m, n, seed) in [(7, 4, 1), (4, 9, 2), (12, 12, 3)] {
            let a = random_matrix(m, n, seed);
            let s = svd(&a).unwrap();
            let err = reconstruct(&s).sub(&a).frobenius_norm();
            assert!(err < 1e-12 * a.frobenius_norm().max(1.0), "err={err}");
            // U, V have orthonormal columns.
            let utu = s.u.tr_mul(&s.u);
            let vtv = s.v.tr_mul(&s.v);
            let k = m.min(n);
            assert!(utu.sub(&DenseMatrix::identity(k)).frobenius_norm() < 1e-12);
            assert!(vtv.sub(&DenseMatrix::identity(k)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn svd_of_diagonal() {
        let a = DenseMatrix::diag(&[3.0, 1.0, 2.0]);
        let s = svd(&a).unwrap();
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 2.0).abs() < 1e-14);
        assert!((s.singular_values[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_rank_deficient() {
        // rank 1: columns proportional
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]).unwrap();
        let s = svd(&a).unwrap();
        assert!(s.singular_values[1] < 1e-13 * s.singular_values[0]);
    }

    #[test]
    fn sym_eig_reconstructs() {
        let b = random_matrix(8, 8, 5);
        let a = b.add(&b.transpose()).scale(0.5);
        let e = sym_eig(&a).unwrap();
        let mut ql = e.vectors.clone();
        for j in 0..8 {
            let lam = e.values[j];
            for v in ql.col_mut(j) {
                *v *= lam;
            }
        }
        let rec = ql.mul(&e.vectors.transpose());
        assert!(rec.sub(&a).frobenius_norm() < 1e-12 * a.frobenius_norm());
        // descending
        for w in e.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn sym_eig_zero_matrix() {
        let e = sym_eig(&DenseMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn spectral_info_rank_threshold() {
        let info = SpectralInfo::from_values(vec![5.0, 2e-15, 0.0], 1e-12);
        assert_eq!(info.rank, 1);
    }
}
