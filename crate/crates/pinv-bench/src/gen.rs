//! Deterministic test-matrix generators: low-rank Gaussian draws and Gram
//! matrices from data files.
//!
//! All randomness flows through a seeded ChaCha8 stream, so a (spec, seed)
//! pair always produces the same matrix, on any platform.

use std::fmt;
use std::path::PathBuf;

use pinv_core::decomp;
use pinv_core::DenseMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::libsvm;
use crate::mm;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Best rank-r approximation of an m×n standard Gaussian draw.
    GaussianRankR { m: usize, n: usize, r: usize },
    /// Best rank-r approximation of G + Gᵀ for an n×n Gaussian G.
    SymGaussianRankR { n: usize, r: usize },
    /// AᵀA of a data matrix read from disk.
    GramFromData(PathBuf),
}

#[derive(Debug)]
pub struct SpecParseError(pub String);

impl fmt::Display for SpecParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad generator spec: {}", self.0)
    }
}

impl std::error::Error for SpecParseError {}

impl GeneratorSpec {
    /// Parses `gaussian:m=500,n=20,r=15`, `sym:n=50,r=10` or `gram:PATH`.
    pub fn parse(text: &str) -> Result<Self, SpecParseError> {
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| SpecParseError(format!("'{text}' (expected kind:args)")))?;
        match kind {
            "gram" => Ok(GeneratorSpec::GramFromData(PathBuf::from(rest))),
            "gaussian" | "sym" => {
                let mut m = None;
                let mut n = None;
                let mut r = None;
                for part in rest.split(',') {
                    let (key, value) = part
                        .split_once('=')
                        .ok_or_else(|| SpecParseError(format!("'{part}' (expected key=value)")))?;
                    let value: usize = value
                        .parse()
                        .map_err(|_| SpecParseError(format!("'{value}' is not a count")))?;
                    match key {
                        "m" => m = Some(value),
                        "n" => n = Some(value),
                        "r" => r = Some(value),
                        other => return Err(SpecParseError(format!("unknown key '{other}'"))),
                    }
                }
                let n = n.ok_or_else(|| SpecParseError("missing n".into()))?;
                let r = r.ok_or_else(|| SpecParseError("missing r".into()))?;
                if kind == "gaussian" {
                    let m = m.ok_or_else(|| SpecParseError("missing m".into()))?;
                    if r == 0 || r > m.min(n) {
                        return Err(SpecParseError(format!("rank {r} out of range for {m}x{n}")));
                    }
                    Ok(GeneratorSpec::GaussianRankR { m, n, r })
                } else {
                    if m.is_some() {
                        return Err(SpecParseError("sym takes n and r only".into()));
                    }
                    if r == 0 || r > n {
                        return Err(SpecParseError(format!("rank {r} out of range for {n}x{n}")));
                    }
                    Ok(GeneratorSpec::SymGaussianRankR { n, r })
                }
            }
            other => Err(SpecParseError(format!("unknown kind '{other}'"))),
        }
    }

    pub fn build(&self, seed: u64) -> Result<DenseMatrix, Box<dyn std::error::Error>> {
        match self {
            GeneratorSpec::GaussianRankR { m, n, r } => Ok(gen_gaussian_rank_r(*m, *n, *r, seed)?),
            GeneratorSpec::SymGaussianRankR { n, r } => Ok(gen_sym_rank_r(*n, *r, seed)?),
            GeneratorSpec::GramFromData(path) => Ok(libsvm::gen_gram(path)?),
        }
    }
}

fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    // uniform in (0, 1]: avoids log(0) below
    (((rng.next_u64() >> 11) + 1) as f64) / (1u64 << 53) as f64
}

/// Standard normal via Box-Muller.
fn standard_normal(rng: &mut ChaCha8Rng, spare: &mut Option<f64>) -> f64 {
    if let Some(v) = spare.take() {
        return v;
    }
    let u1 = unit_open(rng);
    let u2 = unit_open(rng);
    let radius = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    *spare = Some(radius * theta.sin());
    radius * theta.cos()
}

fn gaussian_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spare = None;
    DenseMatrix::from_fn(m, n, |_, _| standard_normal(&mut rng, &mut spare))
}

/// Best rank-r approximation (truncated SVD) of a seeded m×n Gaussian draw.
pub fn gen_gaussian_rank_r(
    m: usize,
    n: usize,
    r: usize,
    seed: u64,
) -> Result<DenseMatrix, pinv_core::Error> {
    if r == 0 || r > m.min(n) {
        return Err(pinv_core::Error::InvalidConfig("rank out of range"));
    }
    let g = gaussian_matrix(m, n, seed);
    if r == m.min(n) {
        return Ok(g);
    }
    let svd = decomp::svd(&g)?;
    let mut us = svd.u;
    for j in 0..svd.singular_values.len() {
        let s = if j < r { svd.singular_values[j] } else { 0.0 };
        for v in us.col_mut(j) {
            *v *= s;
        }
    }
    Ok(us.mul(&svd.v.transpose()))
}

/// Best rank-r approximation of G + Gᵀ (largest |λ| eigenpairs kept); output
/// exactly symmetric.
pub fn gen_sym_rank_r(n: usize, r: usize, seed: u64) -> Result<DenseMatrix, pinv_core::Error> {
    if r == 0 || r > n {
        return Err(pinv_core::Error::InvalidConfig("rank out of range"));
    }
    let g = gaussian_matrix(n, n, seed);
    let sym = g.add(&g.transpose());
    if r == n {
        return Ok(sym);
    }
    let eig = decomp::sym_eig(&sym)?;
    // keep the r eigenvalues of largest magnitude
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.values[j].abs().partial_cmp(&eig.values[i].abs()).unwrap());
    let keep = &order[..r];
    let mut ql = DenseMatrix::zeros(n, r);
    let mut q = DenseMatrix::zeros(n, r);
    for (k, &j) in keep.iter().enumerate() {
        q.col_mut(k).copy_from_slice(eig.vectors.col(j));
        for (dst, &src) in ql.col_mut(k).iter_mut().zip(eig.vectors.col(j)) {
            *dst = src * eig.values[j];
        }
    }
    Ok(ql.mul(&q.transpose()).symmetrize())
}

/// Resolves either `--matrix PATH` or `--gen SPEC` into a matrix.
pub fn load_matrix(
    matrix: Option<&str>,
    genspec: Option<&str>,
    seed: u64,
) -> Result<DenseMatrix, Box<dyn std::error::Error>> {
    match (matrix, genspec) {
        (Some(path), None) => Ok(mm::read_matrix_market(path)?),
        (None, Some(spec)) => GeneratorSpec::parse(spec)?.build(seed),
        _ => Err(Box::new(SpecParseError(
            "exactly one of --matrix and --gen is required".into(),
        ))),
    }
}
