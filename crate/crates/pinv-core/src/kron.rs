//! Kronecker products and column-stacking vectorization.

use crate::matrix::DenseMatrix;

/// Kronecker product with the convention
/// `(A⊗B)[p(r-1)+i, q(s-1)+j] = a_{rs} b_{ij}` (1-based indices),
/// i.e. block `(r, s)` of the result is `a_{rs} · B`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (m, n) = (a.rows(), a.cols());
    let (p, q) = (b.rows(), b.cols());
    let mut out = DenseMatrix::zeros(m * p, n * q);
    for s in 0..n {
        for r in 0..m {
            let ars = a.get(r, s);
            if ars == 0.0 {
                continue;
            }
            for j in 0..q {
                for i in 0..p {
                    out.set(p * r + i, q * s + j, ars * b.get(i, j));
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization: an `m×n` matrix becomes an `mn×1` vector.
pub fn vec_mat(a: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_vec(a.rows() * a.cols(), 1, a.data().to_vec())
        .expect("finite input stays finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn random_matrix(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(m, n, |_, _| uniform(rng))
    }

    #[test]
    fn kron_identities() {
        let i2 = DenseMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), DenseMatrix::identity(4));
        let b = DenseMatrix::from_rows(&[&[1.0, -1.0], &[0.5, 2.0]]).unwrap();
        let scalar = DenseMatrix::from_vec(1, 1, alloc::vec![2.0]).unwrap();
        assert_eq!(kron(&scalar, &b), b.scale(2.0));
    }

    #[test]
    fn kron_matches_index_formula() {
        // Brute-force oracle straight from the defining formula.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(2, 2, &mut rng);
        let b = random_matrix(2, 2, &mut rng);
        let k = kron(&a, &b);
        for r in 1..=2usize {
            for s in 1..=2usize {
                for i in 1..=2usize {
                    for j in 1..=2usize {
                        let expect = a.get(r - 1, s - 1) * b.get(i - 1, j - 1);
                        let got = k.get(2 * (r - 1) + i - 1, 2 * (s - 1) + j - 1);
                        assert_eq!(got, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn vec_by_definition() {
        let a = DenseMatrix::from_rows(&[&[1.0, 3.0], &[2.0, 4.0]]).unwrap();
        assert_eq!(vec_mat(&a).data(), &[1.0, 2.0, 3.0, 4.0]);
        let col = DenseMatrix::from_vec(3, 1, alloc::vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(vec_mat(&col), col);
    }

    #[test]
    fn vec_of_product_is_kron_times_vec() {
        // vec(ABC) = (Cᵀ ⊗ A) vec(B) for 50 random triples.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_matrix(3, 3, &mut rng);
            let b = random_matrix(3, 3, &mut rng);
            let c = random_matrix(3, 3, &mut rng);
            let lhs = vec_mat(&a.mul(&b).mul(&c));
            let rhs = kron(&c.transpose(), &a).mul(&vec_mat(&b));
            assert!(lhs.sub(&rhs).frobenius_norm() < 1e-12);
        }
    }
}
