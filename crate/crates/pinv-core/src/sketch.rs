//! Random sketch matrices and the discrete distributions they are drawn from.
//!
//! A sketch is either a selection of identity columns (`ColumnSubset`,
//! `ColumnMultiset`) or an explicit dense matrix (adaptive sketching uses
//! columns of the current iterate). Products with index sketches are computed
//! by gathering columns, never by materializing the identity.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// A realized sketch matrix `S` with a fixed ambient (row) dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum SketchSample {
    /// `S = I_{:C}` with strictly increasing distinct indices.
    ColumnSubset(Vec<usize>),
    /// `S = I_{:v}` with repeats allowed, order as drawn.
    ColumnMultiset(Vec<usize>),
    /// Dense sketch, `ambient` rows.
    Explicit(DenseMatrix),
}

impl SketchSample {
    /// Number of columns τ.
    pub fn width(&self) -> usize {
        match self {
            SketchSample::ColumnSubset(idx) | SketchSample::ColumnMultiset(idx) => idx.len(),
            SketchSample::Explicit(s) => s.cols(),
        }
    }

    /// Checks the structural invariants against an ambient dimension.
    pub fn validate(&self, ambient: usize) -> Result<()> {
        match self {
            SketchSample::ColumnSubset(idx) => {
                if idx.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidConfig("subset indices must strictly increase"));
                }
                if idx.iter().any(|&i| i >= ambient) {
                    return Err(Error::TauOutOfRange {
                        tau: idx.len(),
                        ambient,
                    });
                }
            }
            SketchSample::ColumnMultiset(idx) => {
                if idx.iter().any(|&i| i >= ambient) {
                    return Err(Error::TauOutOfRange {
                        tau: idx.len(),
                        ambient,
                    });
                }
            }
            SketchSample::Explicit(s) => {
                if s.rows() != ambient {
                    return Err(Error::ShapeMismatch {
                        context: "sketch ambient",
                        left: (ambient, 0),
                        right: (s.rows(), s.cols()),
                    });
                }
            }
        }
        Ok(())
    }

    /// Dense `ambient × τ` form of `S`. Analysis-only; solvers use gathers.
    pub fn materialize(&self, ambient: usize) -> DenseMatrix {
        match self {
            SketchSample::ColumnSubset(idx) | SketchSample::ColumnMultiset(idx) => {
                let mut s = DenseMatrix::zeros(ambient, idx.len());
                for (k, &i) in idx.iter().enumerate() {
                    s.set(i, k, 1.0);
                }
                s
            }
            SketchSample::Explicit(s) => s.clone(),
        }
    }
}

/// `A * S`, gathering columns of `A` when `S` selects identity columns.
pub fn right_apply(a: &DenseMatrix, s: &SketchSample) -> DenseMatrix {
    match s {
        SketchSample::ColumnSubset(idx) | SketchSample::ColumnMultiset(idx) => a.gather_cols(idx),
        SketchSample::Explicit(s) => a.mul(s),
    }
}

/// `Sᵀ * A`, gathering rows of `A` when `S` selects identity columns.
pub fn left_apply_transpose(s: &SketchSample, a: &DenseMatrix) -> DenseMatrix {
    match s {
        SketchSample::ColumnSubset(idx) | SketchSample::ColumnMultiset(idx) => a.gather_rows(idx),
        SketchSample::Explicit(s) => s.tr_mul(a),
    }
}

/// In-place `V -= Sᵀ` for a `τ × ambient` matrix `V`.
pub fn subtract_transpose(v: &mut DenseMatrix, s: &SketchSample) {
    match s {
        SketchSample::ColumnSubset(idx) | SketchSample::ColumnMultiset(idx) => {
            for (k, &i) in idx.iter().enumerate() {
                let cur = v.get(k, i);
                v.set(k, i, cur - 1.0);
            }
        }
        SketchSample::Explicit(s) => {
            for j in 0..v.cols() {
                for k in 0..v.rows() {
                    let cur = v.get(k, j);
                    v.set(k, j, cur - s.get(j, k));
                }
            }
        }
    }
}

/// Unbiased uniform integer in `[0, n)` by rejection.
fn uniform_index<R: RngCore>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as u64;
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return (x % n) as usize;
        }
    }
}

/// Uniform τ-subset of `{0,…,n-1}` (Floyd's algorithm), sorted.
pub fn sample_uniform_batch<R: RngCore>(n: usize, tau: usize, rng: &mut R) -> Result<SketchSample> {
    if tau == 0 || tau > n {
        return Err(Error::TauOutOfRange { tau, ambient: n });
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(tau);
    for j in (n - tau)..n {
        let t = uniform_index(rng, j + 1);
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    chosen.sort_unstable();
    Ok(SketchSample::ColumnSubset(chosen))
}

/// Adaptive sketch `S = X_k I_{:C}`: τ columns of the current iterate,
/// with `C` a uniform τ-subset of the columns of `X_k`.
pub fn sample_adaptive<R: RngCore>(
    x_k: &DenseMatrix,
    tau: usize,
    rng: &mut R,
) -> Result<SketchSample> {
    let cols = x_k.cols();
    if tau == 0 || tau > cols {
        return Err(Error::TauOutOfRange { tau, ambient: cols });
    }
    let subset = match sample_uniform_batch(cols, tau, rng)? {
        SketchSample::ColumnSubset(idx) => idx,
        _ => unreachable!(),
    };
    Ok(SketchSample::Explicit(x_k.gather_cols(&subset)))
}

/// τ-batch with replacement: independent coordinates, optionally weighted.
/// Every per-coordinate probability must be strictly positive.
pub fn sample_batch_with_replacement<R: RngCore>(
    n: usize,
    tau: usize,
    probs: Option<&[f64]>,
    rng: &mut R,
) -> Result<SketchSample> {
    if tau == 0 || n == 0 {
        return Err(Error::TauOutOfRange { tau, ambient: n });
    }
    if let Some(p) = probs {
        if p.len() != n {
            return Err(Error::BadDistribution);
        }
        if p.iter().any(|&v| v <= 0.0) {
            return Err(Error::ZeroProbability);
        }
    }
    let mut idx = Vec::with_capacity(tau);
    match probs {
        None => {
            for _ in 0..tau {
                idx.push(uniform_index(rng, n));
            }
        }
        Some(p) => {
            let total: f64 = p.iter().sum();
            for _ in 0..tau {
                let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * total;
                let mut acc = 0.0;
                let mut pick = n - 1;
                for (i, &pi) in p.iter().enumerate() {
                    acc += pi;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                idx.push(pick);
            }
        }
    }
    Ok(SketchSample::ColumnMultiset(idx))
}

/// A finite discrete distribution `{S_i, p_i}` with strictly positive
/// probabilities summing to one.
#[derive(Debug, Clone)]
pub struct DiscreteSketchDistribution {
    samples: Vec<SketchSample>,
    probs: Vec<f64>,
}

impl DiscreteSketchDistribution {
    pub fn new(samples: Vec<SketchSample>, probs: Vec<f64>) -> Result<Self> {
        if samples.is_empty() || samples.len() != probs.len() {
            return Err(Error::BadDistribution);
        }
        if probs.iter().any(|&p| p <= 0.0) {
            return Err(Error::ZeroProbability);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadDistribution);
        }
        Ok(Self { samples, probs })
    }

    pub fn uniform_over(samples: Vec<SketchSample>) -> Result<Self> {
        let r = samples.len();
        if r == 0 {
            return Err(Error::BadDistribution);
        }
        let p = 1.0 / r as f64;
        let probs = alloc::vec![p; r];
        Ok(Self { samples, probs })
    }

    /// All `(n choose tau)` uniform subsets. Guarded against blowup.
    pub fn enumerate_subsets(n: usize, tau: usize) -> Result<Self> {
        if tau == 0 || tau > n {
            return Err(Error::TauOutOfRange { tau, ambient: n });
        }
        let count = binomial(n, tau).ok_or(Error::AnalysisCap { dim: n, cap: 0 })?;
        if count > 1_000_000 {
            return Err(Error::AnalysisCap {
                dim: count as usize,
                cap: 1_000_000,
            });
        }
        let mut samples = Vec::with_capacity(count as usize);
        let mut current: Vec<usize> = (0..tau).collect();
        loop {
            samples.push(SketchSample::ColumnSubset(current.clone()));
            // next lexicographic combination
            let mut i = tau;
            loop {
                if i == 0 {
                    return Self::uniform_over(samples);
                }
                i -= 1;
                if current[i] != i + n - tau {
                    break;
                }
                if i == 0 {
                    return Self::uniform_over(samples);
                }
            }
            current[i] += 1;
            for j in (i + 1)..tau {
                current[j] = current[j - 1] + 1;
            }
        }
    }

    /// All `n^tau` multisets drawn with replacement, uniform. Enumeration is a
    /// verification tool; capped at 4096 outcomes.
    pub fn enumerate_multisets(n: usize, tau: usize) -> Result<Self> {
        if tau == 0 || n == 0 {
            return Err(Error::TauOutOfRange { tau, ambient: n });
        }
        let mut count: usize = 1;
        for _ in 0..tau {
            count = count.saturating_mul(n);
            if count > 4096 {
                return Err(Error::AnalysisCap {
                    dim: count,
                    cap: 4096,
                });
            }
        }
        let mut samples = Vec::with_capacity(count);
        let mut v = alloc::vec![0usize; tau];
        loop {
            samples.push(SketchSample::ColumnMultiset(v.clone()));
            let mut i = tau;
            loop {
                if i == 0 {
                    return Self::uniform_over(samples);
                }
                i -= 1;
                v[i] += 1;
                if v[i] < n {
                    break;
                }
                v[i] = 0;
                if i == 0 {
                    return Self::uniform_over(samples);
                }
            }
        }
    }

    /// Single identity columns `{e_1,…,e_n}`, uniform.
    pub fn singletons(n: usize) -> Result<Self> {
        Self::uniform_over((0..n).map(|i| SketchSample::ColumnSubset(alloc::vec![i])).collect())
    }

    pub fn samples(&self) -> &[SketchSample] {
        &self.samples
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Draws one sample index by inverse CDF.
    pub fn draw<R: RngCore>(&self, rng: &mut R) -> &SketchSample {
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let mut acc = 0.0;
        for (s, &p) in self.samples.iter().zip(&self.probs) {
            acc += p;
            if u < acc {
                return s;
            }
        }
        self.samples.last().expect("non-empty")
    }

    /// Column concatenation `𝕊 = [S_1 … S_r]` of the realized sketches.
    pub fn stack(&self, ambient: usize) -> DenseMatrix {
        let total: usize = self.samples.iter().map(SketchSample::width).sum();
        let mut out = DenseMatrix::zeros(ambient, total);
        let mut offset = 0;
        for s in &self.samples {
            let dense = s.materialize(ambient);
            for j in 0..dense.cols() {
                out.col_mut(offset + j).copy_from_slice(dense.col(j));
            }
            offset += dense.cols();
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u64)?;
        acc /= (i + 1) as u64;
    }
    Some(acc)
}

/// Distribution with probabilities proportional to `Tr(Sᵢᵀ G² Sᵢ)`.
///
/// Samples whose trace weight vanishes carry no information and are dropped,
/// keeping every retained probability strictly positive.
pub fn convenient_distribution(
    g: &DenseMatrix,
    samples: Vec<SketchSample>,
) -> Result<DiscreteSketchDistribution> {
    if !g.is_symmetric(crate::pinv::SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    let mut weights = Vec::with_capacity(samples.len());
    for s in &samples {
        s.validate(g.rows())?;
        // Tr(Sᵀ G² S) = ‖G S‖_F²
        let gs = right_apply(g, s);
        weights.push(gs.data().iter().map(|v| v * v).sum::<f64>());
    }
    let max_w = weights.iter().fold(0.0_f64, |m, &w| m.max(w));
    if max_w <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let keep_threshold = 1e-14 * max_w;
    let mut kept = Vec::new();
    let mut kept_w = Vec::new();
    for (s, w) in samples.into_iter().zip(weights) {
        if w > keep_threshold {
            kept.push(s);
            kept_w.push(w);
        }
    }
    let total: f64 = kept_w.iter().sum();
    let probs: Vec<f64> = kept_w.iter().map(|w| w / total).collect();
    DiscreteSketchDistribution::new(kept, probs)
}
