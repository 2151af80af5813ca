//! Sketch-and-project pseudoinverse iterations, the Newton-Schulz baseline,
//! and the driver loops that produce per-iteration traces.
//!
//! Update rules (A is m×n, X_k approximates A†):
//! * `satax_step` projects onto the sketched normal equation SᵀAᵀA X = SᵀAᵀ:
//!   X ← X − AᵀAS (SᵀAᵀAAᵀAS)† SᵀAᵀ(AX − I).
//! * `saxas_step` (symmetric A) keeps the iterate symmetric via a two-sided
//!   sketch: X ← X + AS (SᵀA²S)† Sᵀ(A − AXA)S (SᵀA²S)† SᵀA.
//! * `project_step` targets the range projector AA† through PAS = AS:
//!   X ← X − (XAS − AS)(SᵀAᵀAS)†(AS)ᵀ.
//! * `sax_step` / `xa_step` are the full-row-rank / full-column-rank
//!   one-sided variants of the sketched equations AX = I and XA = I.
//! * `newton_schulz_step`: X ← 2X − XAX, quadratically convergent once
//!   ‖I − XA‖ < 1.
//!
//! The hybrid driver runs the sketched method until its cumulative sketched
//! work equals one full matrix product, rescales, and hands over to
//! Newton-Schulz.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::flops;
use crate::matrix::DenseMatrix;
use crate::pinv::{self, DEFAULT_REL_TOL, SYMMETRY_TOL};
use crate::sketch::{
    left_apply_transpose, right_apply, sample_adaptive, sample_batch_with_replacement,
    sample_uniform_batch, subtract_transpose, SketchSample,
};

/// Wall-clock source. The core crate has no clock; callers that want real
/// timings supply one, everything else uses [`NoClock`].
pub trait Clock {
    /// Monotonic seconds from an arbitrary origin.
    fn now(&self) -> f64;
}

/// Clock that always reads zero, for clock-less environments and tests.
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SataxUni,
    SataxAda,
    SaxasUni,
    SaxasAda,
    SaxasRep,
    ProjectUni,
    SaxFullRowRank,
    XaFullColRank,
    NewtonSchulz,
    NsSatax,
}

impl Method {
    /// Row dimension of the sketch for this method on an m×n matrix.
    pub fn sketch_ambient(self, m: usize, n: usize) -> usize {
        match self {
            Method::SataxUni | Method::SataxAda => n,
            Method::SaxasUni | Method::SaxasAda | Method::SaxasRep => n,
            Method::ProjectUni | Method::XaFullColRank => n,
            Method::SaxFullRowRank => m,
            Method::NewtonSchulz => 0,
            Method::NsSatax => n,
        }
    }

    pub fn needs_symmetric(self) -> bool {
        matches!(self, Method::SaxasUni | Method::SaxasAda | Method::SaxasRep)
    }

    pub fn uses_sketch(self) -> bool {
        !matches!(self, Method::NewtonSchulz)
    }

    /// Shape of the iterate for an m×n input.
    fn iterate_shape(self, m: usize, n: usize) -> (usize, usize) {
        match self {
            Method::ProjectUni => (m, m),
            _ => (n, m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitRule {
    /// Each method's documented default start.
    MethodDefault,
    /// X₀ = min(m,n)/‖A‖_F² · Aᵀ.
    ScaledTranspose,
    /// X₀ = A²/‖A‖_F² (symmetric A).
    ScaledSquare,
    /// X₀ = ½ Aᵀ/‖A‖_F².
    NewtonSchulzInit,
    Zero,
    Custom(DenseMatrix),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    pub tau: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop when ‖AXA − A‖_F ≤ tol_residual · ‖A‖_F.
    pub tol_residual: f64,
    /// Residual evaluation cadence; `None` picks ⌈ambient/τ⌉ for sketched
    /// methods and 1 for Newton-Schulz.
    pub trace_every: Option<usize>,
    pub init: InitRule,
}

impl SolverConfig {
    pub fn new(method: Method, tau: usize) -> Self {
        Self {
            method,
            tau,
            seed: 0,
            max_iters: 1000,
            tol_residual: 1e-8,
            trace_every: None,
            init: InitRule::MethodDefault,
        }
    }

    pub fn validate(&self, a: &DenseMatrix) -> Result<()> {
        if a.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if self.tau == 0 {
            return Err(Error::InvalidConfig("tau must be at least 1"));
        }
        if self.tol_residual.is_nan() || self.tol_residual <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive"));
        }
        if self.method == Method::SaxasRep && self.tau < 2 {
            return Err(Error::InvalidConfig(
                "with-replacement sketching needs tau >= 2 for convergence",
            ));
        }
        if self.method.needs_symmetric() && !a.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::NotSymmetric);
        }
        if self.method.uses_sketch() {
            let ambient = self.method.sketch_ambient(a.rows(), a.cols());
            // adaptive sketches select among the iterate's columns
            let pool = match self.method {
                Method::SataxAda => a.rows(),
                Method::SaxasAda => a.cols(),
                _ => ambient,
            };
            if self.tau > pool {
                return Err(Error::TauOutOfRange {
                    tau: self.tau,
                    ambient: pool,
                });
            }
        }
        Ok(())
    }
}

/// One traced iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub phase: &'static str,
    pub time_s: f64,
    pub flops: u64,
    pub residual: f64,
    pub err_oracle: Option<f64>,
}

/// Full result of a driver run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: Vec<TraceRow>,
    pub x: DenseMatrix,
    pub converged: bool,
    pub iterations: usize,
    pub flops: u64,
}

/// X₀ = α Aᵀ with α = min(m,n)/‖A‖_F²; Range(X₀) ⊂ Range(AᵀA).
pub fn init_satax(a: &DenseMatrix) -> Result<DenseMatrix> {
    let norm = a.frobenius_norm();
    let norm2 = norm * norm;
    if norm2 == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let alpha = a.rows().min(a.cols()) as f64 / norm2;
    Ok(a.transpose().scale(alpha))
}

/// X₀ = A²/‖A‖_F² for symmetric A; of the form A·W·A.
pub fn init_saxas(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    let norm = a.frobenius_norm();
    let norm2 = norm * norm;
    if norm2 == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(a.mul(a).scale(1.0 / norm2))
}

/// X₀ = ½ Aᵀ/‖A‖_F², the classical Newton-Schulz start.
pub fn init_newton_schulz(a: &DenseMatrix) -> Result<DenseMatrix> {
    let norm = a.frobenius_norm();
    let norm2 = norm * norm;
    if norm2 == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(a.transpose().scale(0.5 / norm2))
}

fn check_iterate_shape(
    context: &'static str,
    a: &DenseMatrix,
    x: &DenseMatrix,
    shape: (usize, usize),
) -> Result<()> {
    if (x.rows(), x.cols()) != shape {
        return Err(Error::ShapeMismatch {
            context,
            left: (a.rows(), a.cols()),
            right: (x.rows(), x.cols()),
        });
    }
    Ok(())
}

/// X ← X − AᵀAS (SᵀAᵀAAᵀAS)† SᵀAᵀ(AX − I); never forms AᵀA.
pub fn satax_step(a: &DenseMatrix, x: &DenseMatrix, s: &SketchSample) -> Result<DenseMatrix> {
    check_iterate_shape("satax_step", a, x, (a.cols(), a.rows()))?;
    s.validate(a.cols())?;
    let m1 = right_apply(a, s); // AS, m×τ
    let w = a.tr_mul(&m1); // AᵀAS, n×τ
    let g = w.tr_mul(&w); // SᵀAᵀAAᵀAS
    let p = pinv::pinv_psd(&g, DEFAULT_REL_TOL)?;
    // V = SᵀAᵀ(AX − I) = WᵀX − (AS)ᵀ
    let mut v = w.tr_mul(x);
    for i in 0..m1.rows() {
        for k in 0..m1.cols() {
            let cur = v.get(k, i);
            v.set(k, i, cur - m1.get(i, k));
        }
    }
    Ok(x.sub(&w.mul(&p.mul(&v))))
}

/// X ← X + AS (SᵀA²S)† Sᵀ(A − AXA)S (SᵀA²S)† SᵀA for symmetric A.
pub fn saxas_step(a: &DenseMatrix, x: &DenseMatrix, s: &SketchSample) -> Result<DenseMatrix> {
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    check_iterate_shape("saxas_step", a, x, (a.rows(), a.rows()))?;
    s.validate(a.rows())?;
    let m = right_apply(a, s); // AS, n×τ
    let g = m.tr_mul(&m); // SᵀA²S
    let p = pinv::pinv_psd(&g, DEFAULT_REL_TOL)?;
    let sas = left_apply_transpose(s, &m); // SᵀAS
    let b = sas.sub(&m.tr_mul(x).mul(&m)); // Sᵀ(A − AXA)S
    let core = p.mul(&b).mul(&p).symmetrize();
    Ok(x.add(&m.mul(&core).mul(&m.transpose())))
}

/// X ← X − (XAS − AS)(SᵀAᵀAS)†(AS)ᵀ; the iterate converges to AA†.
pub fn project_step(a: &DenseMatrix, x: &DenseMatrix, s: &SketchSample) -> Result<DenseMatrix> {
    check_iterate_shape("project_step", a, x, (a.rows(), a.rows()))?;
    s.validate(a.cols())?;
    let m = right_apply(a, s); // AS, m×τ
    let g = m.tr_mul(&m);
    let p = pinv::pinv_psd(&g, DEFAULT_REL_TOL)?;
    let r = x.mul(&m).sub(&m);
    Ok(x.sub(&r.mul(&p).mul(&m.transpose())))
}

/// X ← X − AᵀS (SᵀAAᵀS)† Sᵀ(AX − I), for full-row-rank A.
pub fn sax_step(a: &DenseMatrix, x: &DenseMatrix, s: &SketchSample) -> Result<DenseMatrix> {
    check_iterate_shape("sax_step", a, x, (a.cols(), a.rows()))?;
    s.validate(a.rows())?;
    let w = left_apply_transpose(s, a).transpose(); // AᵀS, n×τ
    let g = w.tr_mul(&w); // SᵀAAᵀS
    let p = pinv::pinv_psd(&g, DEFAULT_REL_TOL)?;
    // V = Sᵀ(AX − I) = (AᵀS)ᵀX − Sᵀ
    let mut v = w.tr_mul(x);
    subtract_transpose(&mut v, s);
    Ok(x.sub(&w.mul(&p.mul(&v))))
}

/// X ← X − (XA − I)S (SᵀAᵀAS)† SᵀAᵀ, for full-column-rank A.
pub fn xa_step(a: &DenseMatrix, x: &DenseMatrix, s: &SketchSample) -> Result<DenseMatrix> {
    check_iterate_shape("xa_step", a, x, (a.cols(), a.rows()))?;
    s.validate(a.cols())?;
    let m = right_apply(a, s); // AS, m×τ
    let g = m.tr_mul(&m);
    let p = pinv::pinv_psd(&g, DEFAULT_REL_TOL)?;
    // U = (XA − I)S = X(AS) − S
    let mut u = x.mul(&m);
    match s {
        SketchSample::ColumnSubset(idx) | SketchSample::ColumnMultiset(idx) => {
            for (k, &i) in idx.iter().enumerate() {
                let cur = u.get(i, k);
                u.set(i, k, cur - 1.0);
            }
        }
        SketchSample::Explicit(se) => u = u.sub(se),
    }
    Ok(x.sub(&u.mul(&p).mul(&m.transpose())))
}

/// X ← 2X − XAX, associated in the cheaper order.
pub fn newton_schulz_step(a: &DenseMatrix, x: &DenseMatrix) -> Result<DenseMatrix> {
    check_iterate_shape("newton_schulz_step", a, x, (a.cols(), a.rows()))?;
    let xax = if a.rows() <= a.cols() {
        x.mul(&a.mul(x))
    } else {
        x.mul(a).mul(x)
    };
    Ok(x.scale(2.0).sub(&xax))
}

/// Progress metric per method: ‖AXA − A‖_F, except the range-projector method
/// which uses ‖XA − A‖_F (zero exactly at X = AA†).
pub fn method_residual(a: &DenseMatrix, x: &DenseMatrix, method: Method) -> Result<f64> {
    if method == Method::ProjectUni {
        check_iterate_shape("residual", a, x, (a.rows(), a.rows()))?;
        Ok(x.mul(a).sub(a).frobenius_norm())
    } else {
        pinv::residual(a, x)
    }
}

fn default_init(method: Method, a: &DenseMatrix) -> Result<DenseMatrix> {
    match method {
        Method::SataxUni | Method::SataxAda | Method::NsSatax => init_satax(a),
        Method::SaxasUni | Method::SaxasAda | Method::SaxasRep => init_saxas(a),
        Method::NewtonSchulz => init_newton_schulz(a),
        Method::ProjectUni => Ok(DenseMatrix::zeros(a.rows(), a.rows())),
        Method::SaxFullRowRank | Method::XaFullColRank => {
            Ok(DenseMatrix::zeros(a.cols(), a.rows()))
        }
    }
}

fn initial_iterate(cfg: &SolverConfig, a: &DenseMatrix) -> Result<(DenseMatrix, u64)> {
    let (m, n) = (a.rows(), a.cols());
    let x0 = match &cfg.init {
        InitRule::MethodDefault => default_init(cfg.method, a)?,
        InitRule::ScaledTranspose => init_satax(a)?,
        InitRule::ScaledSquare => init_saxas(a)?,
        InitRule::NewtonSchulzInit => init_newton_schulz(a)?,
        InitRule::Zero => {
            let shape = cfg.method.iterate_shape(m, n);
            DenseMatrix::zeros(shape.0, shape.1)
        }
        InitRule::Custom(x) => x.clone(),
    };
    let flops = match &cfg.init {
        InitRule::Zero | InitRule::Custom(_) => 0,
        InitRule::ScaledTranspose => flops::init_scaled_transpose(m, n),
        InitRule::ScaledSquare => flops::init_scaled_square(n),
        InitRule::NewtonSchulzInit => flops::init_newton_schulz(m, n),
        InitRule::MethodDefault => match cfg.method {
            Method::SataxUni | Method::SataxAda | Method::NsSatax => {
                flops::init_scaled_transpose(m, n)
            }
            Method::SaxasUni | Method::SaxasAda | Method::SaxasRep => flops::init_scaled_square(n),
            Method::NewtonSchulz => flops::init_newton_schulz(m, n),
            _ => 0,
        },
    };
    let shape = cfg.method.iterate_shape(m, n);
    check_iterate_shape("initial iterate", a, &x0, shape)?;
    Ok((x0, flops))
}

fn step_flops(method: Method, m: usize, n: usize, tau: usize) -> u64 {
    match method {
        Method::SataxUni => flops::satax_step(m, n, tau, false),
        Method::SataxAda => flops::satax_step(m, n, tau, true),
        Method::SaxasUni | Method::SaxasRep => flops::saxas_step(n, tau, false),
        Method::SaxasAda => flops::saxas_step(n, tau, true),
        Method::ProjectUni => flops::project_step(m, tau),
        Method::SaxFullRowRank => flops::sax_step(m, n, tau),
        Method::XaFullColRank => flops::xa_step(m, n, tau),
        Method::NewtonSchulz => flops::newton_schulz_step(m, n),
        Method::NsSatax => 0, // handled phase by phase in run_hybrid
    }
}

fn draw_sketch(
    method: Method,
    a: &DenseMatrix,
    x: &DenseMatrix,
    tau: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<SketchSample>> {
    let (m, n) = (a.rows(), a.cols());
    Ok(match method {
        Method::SataxUni | Method::NsSatax => Some(sample_uniform_batch(n, tau, rng)?),
        Method::SataxAda | Method::SaxasAda => Some(sample_adaptive(x, tau, rng)?),
        Method::SaxasUni => Some(sample_uniform_batch(n, tau, rng)?),
        Method::SaxasRep => Some(sample_batch_with_replacement(n, tau, None, rng)?),
        Method::ProjectUni | Method::XaFullColRank => Some(sample_uniform_batch(n, tau, rng)?),
        Method::SaxFullRowRank => Some(sample_uniform_batch(m, tau, rng)?),
        Method::NewtonSchulz => None,
    })
}

fn apply_step(
    method: Method,
    a: &DenseMatrix,
    x: &DenseMatrix,
    s: Option<&SketchSample>,
) -> Result<DenseMatrix> {
    match method {
        Method::SataxUni | Method::SataxAda | Method::NsSatax => {
            satax_step(a, x, s.expect("sketched method"))
        }
        Method::SaxasUni | Method::SaxasAda | Method::SaxasRep => {
            saxas_step(a, x, s.expect("sketched method"))
        }
        Method::ProjectUni => project_step(a, x, s.expect("sketched method")),
        Method::SaxFullRowRank => sax_step(a, x, s.expect("sketched method")),
        Method::XaFullColRank => xa_step(a, x, s.expect("sketched method")),
        Method::NewtonSchulz => newton_schulz_step(a, x),
    }
}

fn trace_cadence(cfg: &SolverConfig, a: &DenseMatrix) -> usize {
    cfg.trace_every.unwrap_or_else(|| match cfg.method {
        Method::NewtonSchulz => 1,
        m => {
            let ambient = m.sketch_ambient(a.rows(), a.cols()).max(1);
            ambient.div_ceil(cfg.tau).max(1)
        }
    })
}

fn oracle_error(x: &DenseMatrix, oracle: Option<&DenseMatrix>) -> Option<f64> {
    oracle.and_then(|o| {
        if (o.rows(), o.cols()) == (x.rows(), x.cols()) {
            Some(x.sub(o).frobenius_norm())
        } else {
            None
        }
    })
}

/// Runs one method to tolerance or iteration budget, recording a trace.
///
/// Residual evaluation happens only at the trace cadence and is excluded from
/// both the time and flop columns. `oracle`, when given and shape-compatible,
/// adds the error ‖X_k − oracle‖_F to each row.
pub fn run(
    a: &DenseMatrix,
    cfg: &SolverConfig,
    oracle: Option<&DenseMatrix>,
    clock: &dyn Clock,
) -> Result<RunOutcome> {
    cfg.validate(a)?;
    if cfg.method == Method::NsSatax {
        return run_hybrid(a, cfg, oracle, clock);
    }
    let (m, n) = (a.rows(), a.cols());
    let stop = cfg.tol_residual * a.frobenius_norm();
    let cadence = trace_cadence(cfg, a);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let (mut x, mut total_flops) = initial_iterate(cfg, a)?;
    let mut trace = Vec::new();
    let mut elapsed = 0.0;
    let mut residual = method_residual(a, &x, cfg.method)?;
    trace.push(TraceRow {
        iter: 0,
        phase: "main",
        time_s: 0.0,
        flops: total_flops,
        residual,
        err_oracle: oracle_error(&x, oracle),
    });
    if residual <= stop {
        return Ok(RunOutcome {
            trace,
            x,
            converged: true,
            iterations: 0,
            flops: total_flops,
        });
    }

    let per_step = step_flops(cfg.method, m, n, cfg.tau);
    let mut converged = false;
    let mut k = 0;
    while k < cfg.max_iters {
        k += 1;
        let s = draw_sketch(cfg.method, a, &x, cfg.tau, &mut rng)?;
        let t0 = clock.now();
        x = apply_step(cfg.method, a, &x, s.as_ref())?;
        elapsed += clock.now() - t0;
        total_flops += per_step;
        if k % cadence == 0 || k == cfg.max_iters {
            residual = method_residual(a, &x, cfg.method)?;
            trace.push(TraceRow {
                iter: k,
                phase: "main",
                time_s: elapsed,
                flops: total_flops,
                residual,
                err_oracle: oracle_error(&x, oracle),
            });
            if residual <= stop {
                converged = true;
                break;
            }
        }
    }
    Ok(RunOutcome {
        trace,
        x,
        converged,
        iterations: k,
        flops: total_flops,
    })
}

/// How many consecutive residual increases the Newton-Schulz phase tolerates.
const DIVERGENCE_PATIENCE: usize = 5;

/// Sketched warm start followed by Newton-Schulz.
///
/// Phase one runs the uniform-batch sketched method for t = ⌈ambient/τ⌉
/// iterations — the point where cumulative sketched work equals one full
/// matrix product. The iterate is then rescaled to X/‖XA‖_F and phase two
/// iterates X ← 2X − XAX. The rescale makes ‖I − XA‖ < 1 likely but not
/// certain, so five consecutive residual increases abort with an error.
pub fn run_hybrid(
    a: &DenseMatrix,
    cfg: &SolverConfig,
    oracle: Option<&DenseMatrix>,
    clock: &dyn Clock,
) -> Result<RunOutcome> {
    if cfg.method != Method::NsSatax {
        return Err(Error::InvalidConfig("hybrid driver requires the hybrid method"));
    }
    cfg.validate(a)?;
    let (m, n) = (a.rows(), a.cols());
    let ambient = Method::NsSatax.sketch_ambient(m, n);
    let stop = cfg.tol_residual * a.frobenius_norm();
    let switch = ambient.div_ceil(cfg.tau).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let (mut x, mut total_flops) = initial_iterate(cfg, a)?;
    let mut trace = Vec::new();
    let mut elapsed = 0.0;
    let mut residual = pinv::residual(a, &x)?;
    trace.push(TraceRow {
        iter: 0,
        phase: "satax",
        time_s: 0.0,
        flops: total_flops,
        residual,
        err_oracle: oracle_error(&x, oracle),
    });
    if residual <= stop {
        return Ok(RunOutcome {
            trace,
            x,
            converged: true,
            iterations: 0,
            flops: total_flops,
        });
    }

    let satax_flops = flops::satax_step(m, n, cfg.tau, false);
    let mut k = 0;
    while k < switch.min(cfg.max_iters) {
        k += 1;
        let s = sample_uniform_batch(ambient, cfg.tau, &mut rng)?;
        let t0 = clock.now();
        x = satax_step(a, &x, &s)?;
        elapsed += clock.now() - t0;
        total_flops += satax_flops;
    }
    residual = pinv::residual(a, &x)?;
    trace.push(TraceRow {
        iter: k,
        phase: "satax",
        time_s: elapsed,
        flops: total_flops,
        residual,
        err_oracle: oracle_error(&x, oracle),
    });
    if residual <= stop {
        return Ok(RunOutcome {
            trace,
            x,
            converged: true,
            iterations: k,
            flops: total_flops,
        });
    }

    // rescale so that ‖XA‖_F = 1 before handing over
    let t0 = clock.now();
    let xa_norm = x.mul(a).frobenius_norm();
    if xa_norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    x = x.scale(1.0 / xa_norm);
    elapsed += clock.now() - t0;
    total_flops += flops::hybrid_rescale(m, n);

    let ns_flops = flops::newton_schulz_step(m, n);
    let mut prev_residual = pinv::residual(a, &x)?;
    let mut increases = 0;
    let mut converged = false;
    while k < cfg.max_iters {
        k += 1;
        let t0 = clock.now();
        x = newton_schulz_step(a, &x)?;
        elapsed += clock.now() - t0;
        total_flops += ns_flops;
        residual = pinv::residual(a, &x)?;
        trace.push(TraceRow {
            iter: k,
            phase: "ns",
            time_s: elapsed,
            flops: total_flops,
            residual,
            err_oracle: oracle_error(&x, oracle),
        });
        if residual <= stop {
            converged = true;
            break;
        }
        if residual > prev_residual {
            increases += 1;
            if increases >= DIVERGENCE_PATIENCE {
                return Err(Error::Diverged { iteration: k });
            }
        } else {
            increases = 0;
        }
        prev_residual = residual;
    }
    Ok(RunOutcome {
        trace,
        x,
        converged,
        iterations: k,
        flops: total_flops,
    })
}
