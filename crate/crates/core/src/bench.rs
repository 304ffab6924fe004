//! Timing comparison between the closed-form mode computation and the
//! dense oracle solve.
//!
//! The closed-form path builds the reduced matrices from twelve scalars and
//! never touches a `P x P` matrix, so its cost is independent of `P`; the
//! dense path assembles and diagonalizes the full product matrix at
//! `O(P^3)`.

use serde::Serialize;
use std::time::Instant;

use crate::error::Result;
use crate::spectral::SpectralSolution;
use crate::system::SystemSpec;
use crate::verify::{dense_eigenvalues, random_spec};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BenchPoint {
    pub n: usize,
    pub p: usize,
    pub t_analytic_s: f64,
    pub t_dense_s: f64,
    pub speedup: f64,
}

fn time_analytic(spec: &SystemSpec) -> Result<f64> {
    // Repeat until the clock resolves the closed-form solve.
    let mut reps = 1usize;
    loop {
        let start = Instant::now();
        for _ in 0..reps {
            let solution = SpectralSolution::solve(spec)?;
            std::hint::black_box(&solution);
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed > 2e-2 || reps >= 1 << 22 {
            return Ok(elapsed / reps as f64);
        }
        reps *= 4;
    }
}

fn run_point(n: usize, seed: u64) -> Result<BenchPoint> {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed ^ n as u64);
    let spec = random_spec(n, &mut rng);
    let t_analytic = time_analytic(&spec)?;
    let time_dense = || -> Result<f64> {
        let start = Instant::now();
        let dense = dense_eigenvalues(&spec)?;
        std::hint::black_box(&dense);
        Ok(start.elapsed().as_secs_f64())
    };
    let mut t_dense = time_dense()?;
    if t_dense < 0.5 {
        // Cheap solves get a second run; the minimum shrugs off transient
        // machine load.
        t_dense = t_dense.min(time_dense()?);
    }
    Ok(BenchPoint {
        n,
        p: spec.p(),
        t_analytic_s: t_analytic,
        t_dense_s: t_dense,
        speedup: t_dense / t_analytic,
    })
}

/// Times both paths for each particle count. `parallel` runs the dense
/// solves concurrently (one thread per point); analytic timings always run
/// sequentially first for stability.
pub fn run(ns: &[usize], seed: u64, parallel: bool) -> Result<Vec<BenchPoint>> {
    if !parallel {
        return ns.iter().map(|&n| run_point(n, seed)).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| scope.spawn(move || run_point(n, seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench thread panicked"))
            .collect()
    })
}

/// Least-squares slope of `log t_dense` against `log P`. Near 3 when the
/// cubic eigensolve dominates.
pub fn dense_slope(points: &[BenchPoint]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|b| (b.p as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|b| b.t_dense_s.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
