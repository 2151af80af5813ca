//! Acceptance gate: one test per criterion, each printing a single
//! `criterion NN <name>: PASS|FAIL` line (visible with `--nocapture`, and in
//! the failure output otherwise).

use std::io::Write as _;
use std::process::{Command, Output};
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use pinv_bench::gen::{gen_gaussian_rank_r, gen_sym_rank_r};
use pinv_core::matrix::DenseMatrix;
use pinv_core::pinv::{pinv_exact, residual, DEFAULT_REL_TOL};
use pinv_core::rate::{
    satax_rate_bound, satax_rate_exact, saxas_convergence_certificate, DEFAULT_KRON_CAP,
    DEFAULT_RATE_CAP,
};
use pinv_core::sketch::{
    convenient_distribution, sample_uniform_batch, DiscreteSketchDistribution, SketchSample,
};
use pinv_core::solver::{
    init_newton_schulz, init_satax, init_saxas, newton_schulz_step, project_step, satax_step,
    saxas_step, run, Method, NoClock, SolverConfig,
};

fn report(number: u32, name: &str, ok: bool) {
    println!("criterion {number:02} {name}: {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {number:02} {name}: FAIL");
}

fn full_sketch(n: usize) -> SketchSample {
    SketchSample::ColumnSubset((0..n).collect())
}

#[test]
fn criterion_01_pseudoinverse_oracle_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut ok = true;
    let t = 1e-10;
    for i in 0..100u64 {
        let m = 1 + (rng.next_u64() % 50) as usize;
        let n = 1 + (rng.next_u64() % 50) as usize;
        let min = m.min(n);
        let r = match i % 3 {
            0 => 1,
            1 => min.div_ceil(2),
            _ => min,
        };
        let a = gen_gaussian_rank_r(m, n, r, 1000 + i).unwrap();
        let x = pinv_exact(&a, DEFAULT_REL_TOL).unwrap();
        let na = a.frobenius_norm();
        let nx = x.frobenius_norm();
        let ax = a.mul(&x);
        let xa = x.mul(&a);
        // the four defining identities
        ok &= a.mul(&xa).sub(&a).frobenius_norm() <= t * na;
        ok &= x.mul(&ax).sub(&x).frobenius_norm() <= t * nx.max(1.0);
        ok &= ax.transpose().sub(&ax).frobenius_norm() <= t * (1.0 + na * nx);
        ok &= xa.transpose().sub(&xa).frobenius_norm() <= t * (1.0 + na * nx);
        // Aᵀ = A†AAᵀ and Aᵀ = AᵀAA†
        let at = a.transpose();
        ok &= x.mul(&a).mul(&at).sub(&at).frobenius_norm() <= t * na;
        ok &= at.mul(&a).mul(&x).sub(&at).frobenius_norm() <= t * na;
    }
    ok &= start.elapsed().as_secs_f64() < 5.0;
    report(1, "pseudoinverse oracle suite", ok);
}

#[test]
fn criterion_02_full_sketch_one_step_exactness() {
    let mut ok = true;
    for i in 0..20u64 {
        let a = gen_gaussian_rank_r(10 + (i % 5) as usize, 8, 5, 2000 + i).unwrap();
        let p = pinv_exact(&a, DEFAULT_REL_TOL).unwrap();
        let x0 = init_satax(&a).unwrap();
        let x1 = satax_step(&a, &x0, &full_sketch(a.cols())).unwrap();
        ok &= x1.sub(&p).frobenius_norm() <= 1e-8 * p.frobenius_norm();

        let a = gen_sym_rank_r(6 + (i % 4) as usize, 4, 2100 + i).unwrap();
        let p = pinv_exact(&a, DEFAULT_REL_TOL).unwrap();
        let x0 = init_saxas(&a).unwrap();
        let x1 = saxas_step(&a, &x0, &full_sketch(a.rows())).unwrap();
        ok &= x1.sub(&p).frobenius_norm() <= 1e-8 * p.frobenius_norm();
    }
    report(2, "full-sketch one-step exactness", ok);
}

/// Shared setup for criteria 3 and 4: the fixed 30x20 rank-10 instance.
fn l2_rate_instance() -> (DenseMatrix, DenseMatrix) {
    let a = gen_gaussian_rank_r(30, 20, 10, 0).unwrap();
    let p = pinv_exact(&a, DEFAULT_REL_TOL).unwrap();
    (a, p)
}

#[test]
fn criterion_03_l2_linear_rate() {
    let start = Instant::now();
    let (a, p) = l2_rate_instance();
    let dist = DiscreteSketchDistribution::enumerate_subsets(20, 5).unwrap();
    let rho = satax_rate_exact(&a, &dist, DEFAULT_RATE_CAP).unwrap().rho_exact;
    let x0 = init_satax(&a).unwrap();
    let e0 = x0.sub(&p).frobenius_norm();
    let checkpoints = [10usize, 50, 100];
    let mut sums = [0.0f64; 3];
    let trials = 200;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + trial);
        let mut x = x0.clone();
        for k in 1..=100 {
            let s = sample_uniform_batch(20, 5, &mut rng).unwrap();
            x = satax_step(&a, &x, &s).unwrap();
            if let Some(slot) = checkpoints.iter().position(|&c| c == k) {
                let e = x.sub(&p).frobenius_norm();
                sums[slot] += e * e;
            }
        }
    }
    let mut ok = true;
    for (slot, &k) in checkpoints.iter().enumerate() {
        let mean = sums[slot] / trials as f64;
        let bound = 1.5 * rho.powi(k as i32) * e0 * e0;
        ok &= mean <= bound;
    }
    ok &= start.elapsed().as_secs_f64() < 60.0;
    report(3, "expected squared error contracts linearly", ok);
}

#[test]
fn criterion_04_monotonicity_and_invariance() {
    let (a, p) = l2_rate_instance();
    let x0 = init_satax(&a).unwrap();
    // projector onto Range(Aᵀ), which contains every iterate
    let at = a.transpose();
    let proj = at.mul(&pinv_exact(&at, DEFAULT_REL_TOL).unwrap());
    let mut ok = true;
    for trial in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + trial);
        let mut x = x0.clone();
        let mut err = x.sub(&p).frobenius_norm();
        for _ in 0..100 {
            let s = sample_uniform_batch(20, 5, &mut rng).unwrap();
            x = satax_step(&a, &x, &s).unwrap();
            let e = x.sub(&p).frobenius_norm();
            ok &= e <= err + 1e-12 * p.frobenius_norm().max(1.0);
            err = e;
            ok &= x.sub(&proj.mul(&x)).frobenius_norm() <= 1e-10 * x.frobenius_norm().max(1.0);
        }
    }
    // symmetric-method trials: symmetry and A·_·A invariance on top
    let sa = gen_sym_rank_r(20, 10, 0).unwrap();
    let sp = pinv_exact(&sa, DEFAULT_REL_TOL).unwrap();
    let range_proj = sa.mul(&sp);
    let sx0 = init_saxas(&sa).unwrap();
    for trial in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + trial);
        let mut x = sx0.clone();
        let mut err = x.sub(&sp).frobenius_norm();
        for _ in 0..100 {
            let s = sample_uniform_batch(20, 5, &mut rng).unwrap();
            x = saxas_step(&sa, &x, &s).unwrap();
            let e = x.sub(&sp).frobenius_norm();
            ok &= e <= err + 1e-12 * sp.frobenius_norm().max(1.0);
            err = e;
            ok &= x.transpose().sub(&x).frobenius_norm() <= 1e-10 * x.frobenius_norm().max(1.0);
            let d = x.sub(&sp);
            let off = d.sub(&range_proj.mul(&d).mul(&range_proj)).frobenius_norm();
            ok &= off <= 1e-10 * d.frobenius_norm().max(1.0);
        }
    }
    report(4, "per-step monotonicity and subspace invariance", ok);
}

#[test]
fn criterion_05_exact_rate_below_trace_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut ok = true;
    for i in 0..20u64 {
        let n = 2 + (rng.next_u64() % 9) as usize;
        let m = n + 1 + (rng.next_u64() % 4) as usize;
        let a = gen_gaussian_rank_r(m, n, n, 5000 + i).unwrap();
        let singles = (0..n).map(|j| SketchSample::ColumnSubset(vec![j])).collect();
        let dist = convenient_distribution(&a.tr_mul(&a), singles).unwrap();
        let exact = satax_rate_exact(&a, &dist, DEFAULT_RATE_CAP).unwrap().rho_exact;
        let bound = satax_rate_bound(&a, &dist.stack(n)).unwrap();
        ok &= exact <= bound + 1e-10;
    }
    report(5, "exact rate below trace bound under convenient probabilities", ok);
}

#[test]
fn criterion_06_with_replacement_certificate() {
    let mut ok = true;
    for n in 2..=4usize {
        let a = gen_sym_rank_r(n, n, 600 + n as u64).unwrap();
        let pairs = DiscreteSketchDistribution::enumerate_multisets(n, 2).unwrap();
        ok &= saxas_convergence_certificate(&a, pairs.samples(), DEFAULT_KRON_CAP).unwrap();
        let singles = DiscreteSketchDistribution::singletons(n).unwrap();
        ok &= !saxas_convergence_certificate(&a, singles.samples(), DEFAULT_KRON_CAP).unwrap();
    }
    report(6, "tau-2 multiset certificate holds, singleton certificate fails", ok);
}

#[test]
fn criterion_07_newton_schulz_quadratic_phase() {
    // diagonal spectra; the post-threshold ratio constant tracks ||A||_F/sigma_min,
    // so each family keeps that quotient at or below 10
    let spectra: Vec<Vec<f64>> = vec![
        geometric_spectrum(20, 1.0, 2.0),
        geometric_spectrum(10, 1.0, 3.0),
        geometric_spectrum(5, 1.0, 5.0),
    ];
    let mut ok = true;
    for sigma in &spectra {
        let a = DenseMatrix::diag(sigma);
        let na = a.frobenius_norm();
        let mut x = init_newton_schulz(&a).unwrap();
        let mut prev: Option<f64> = None;
        for _ in 0..200 {
            x = newton_schulz_step(&a, &x).unwrap();
            let r = residual(&a, &x).unwrap() / na;
            if let Some(p) = prev {
                if p < 0.1 && r > 1e-13 {
                    ok &= r <= 10.0 * p * p;
                }
            }
            if r <= 1e-13 {
                break;
            }
            prev = Some(r);
        }
    }
    report(7, "quadratic residual contraction below threshold", ok);
}

fn geometric_spectrum(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64))
        .collect()
}

#[test]
fn criterion_08_projection_method_reaches_range_projector() {
    let mut ok = true;
    let (n, tau) = (12usize, 3usize);
    let budget = 50 * (n / tau);
    for seed in 0..10u64 {
        let a = gen_gaussian_rank_r(20, n, 8, 8000 + seed).unwrap();
        let target = a.mul(&pinv_exact(&a, DEFAULT_REL_TOL).unwrap()); // AA†
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = DenseMatrix::zeros(20, 20);
        let mut reached = false;
        for _ in 0..budget {
            let s = sample_uniform_batch(n, tau, &mut rng).unwrap();
            x = project_step(&a, &x, &s).unwrap();
            if x.sub(&target).frobenius_norm() < 1e-6 {
                reached = true;
                break;
            }
        }
        ok &= reached;
    }
    report(8, "projection iteration reaches the range projector", ok);
}

/// Flops recorded at the first trace row whose residual falls at or below
/// `tol_rel`·‖A‖_F; u64::MAX when the trace never gets there.
fn flops_to_threshold(
    a: &DenseMatrix,
    method: Method,
    tau: usize,
    seed: u64,
    tol_rel: f64,
) -> u64 {
    let mut cfg = SolverConfig::new(method, tau);
    cfg.seed = seed;
    cfg.max_iters = 2000;
    cfg.tol_residual = tol_rel;
    let outcome = run(a, &cfg, None, &NoClock).unwrap();
    let stop = tol_rel * a.frobenius_norm();
    outcome
        .trace
        .iter()
        .find(|row| row.residual <= stop)
        .map(|row| row.flops)
        .unwrap_or(u64::MAX)
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v[v.len() / 2]
}

#[test]
fn criterion_09_flop_crossover_on_tall_matrices() {
    let start = Instant::now();
    let mut satax_coarse = Vec::new();
    let mut satax_fine = Vec::new();
    let mut ns_coarse = Vec::new();
    let mut ns_fine = Vec::new();
    for seed in 0..10u64 {
        let a = gen_gaussian_rank_r(2000, 25, 20, 9000 + seed).unwrap();
        satax_coarse.push(flops_to_threshold(&a, Method::SataxUni, 5, seed, 1e-2));
        satax_fine.push(flops_to_threshold(&a, Method::SataxUni, 5, seed, 1e-8));
        ns_coarse.push(flops_to_threshold(&a, Method::NewtonSchulz, 1, seed, 1e-2));
        ns_fine.push(flops_to_threshold(&a, Method::NewtonSchulz, 1, seed, 1e-8));
    }
    let mut ok = median(satax_coarse) < median(ns_coarse); // sketched wins the coarse race
    ok &= median(ns_fine) < median(satax_fine); // dense baseline wins the fine race
    ok &= start.elapsed().as_secs_f64() < 600.0;
    report(9, "sketched method faster to 1e-2, dense baseline faster to 1e-8", ok);
}

#[test]
fn criterion_10_hybrid_beats_dense_baseline() {
    let mut hybrid = Vec::new();
    let mut ns = Vec::new();
    for seed in 0..10u64 {
        let a = gen_gaussian_rank_r(2000, 25, 20, 9000 + seed).unwrap();
        hybrid.push(flops_to_threshold(&a, Method::NsSatax, 5, seed, 1e-6));
        ns.push(flops_to_threshold(&a, Method::NewtonSchulz, 1, seed, 1e-6));
    }
    report(10, "hybrid reaches 1e-6 within the dense baseline's flops", median(hybrid) <= median(ns));
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pinv-bench"))
}

fn strip_time(text: &str) -> String {
    text.lines()
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let plain = fields.first() == Some(&"iter")
                || fields.first().map(|f| f.parse::<u64>().is_ok()) == Some(true);
            if fields.len() < 4 {
                return line.to_string();
            }
            let time_idx = if plain { 2 } else { 3 };
            fields
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != time_idx)
                .map(|(_, f)| *f)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn normalized(out: &Output) -> (Option<i32>, String, String) {
    (
        out.status.code(),
        strip_time(&String::from_utf8_lossy(&out.stdout)),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn criterion_11_cli_determinism() {
    let mtx = std::env::temp_dir().join("acceptance_diag11.mtx");
    let mut f = std::fs::File::create(&mtx).unwrap();
    f.write_all(b"%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n")
        .unwrap();
    let mtx = mtx.to_str().unwrap();
    let examples: Vec<Vec<&str>> = vec![
        vec!["run", "--method", "ns", "--gen", "gaussian:m=4,n=4,r=4", "--tol", "1e-8"],
        vec!["run", "--method", "satax_uni", "--tau", "999999", "--gen", "gaussian:m=10,n=5,r=5"],
        vec!["run", "--method", "saxas_rep", "--tau", "1", "--gen", "sym:n=4,r=4"],
        vec!["certify", "--matrix", mtx, "--dist", "singletons", "--rate", "satax"],
        vec!["certify", "--gen", "gaussian:m=5,n=3,r=2", "--dist", "uniform:tau=3", "--rate", "satax"],
        vec!["certify", "--gen", "sym:n=3,r=3", "--dist", "rep:tau=2", "--rate", "saxas"],
        vec![
            "compare", "--methods", "satax_uni,ns", "--tau", "2",
            "--gen", "gaussian:m=12,n=6,r=5", "--max-iters", "200",
        ],
        vec![
            "compare", "--methods", "ns-satax", "--tau", "2",
            "--gen", "gaussian:m=12,n=6,r=5", "--max-iters", "200",
        ],
    ];
    let mut ok = true;
    for args in &examples {
        let a = bin().args(args).output().unwrap();
        let b = bin().args(args).output().unwrap();
        ok &= normalized(&a) == normalized(&b);
    }
    report(11, "byte-identical reruns outside the time column", ok);
}
