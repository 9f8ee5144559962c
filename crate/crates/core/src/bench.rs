//! Wall-clock comparison of the reduced pipeline against the dense oracle.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::brute_force_spectrum_tensor;
use crate::presets::bench_desk;
use crate::schmidt::decompose;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub reduced_s: f64,
    pub oracle_s: f64,
    /// `oracle_s / reduced_s`
    pub ratio: f64,
    /// Largest deviation over the top 50 weights, relative to the largest.
    pub max_dev: f64,
}

/// Times both paths on `bench_desk(n)` for each `n`, single-threaded.
/// The reduced path is repeated until it has run for at least `min_s`.
pub fn benchmark(sizes: &[usize], min_s: f64) -> Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| sizes.iter().map(|&n| row(n, min_s)).collect())
}

fn row(n: usize, min_s: f64) -> Result<BenchRow> {
    if n < 2 {
        return Err(Error::Config(format!("benchmark size {n} is too small")));
    }
    let setup = bench_desk(n);
    let psi = setup.build()?;

    let t = Instant::now();
    let mut runs = 0u32;
    let mut result = None;
    while runs == 0 || t.elapsed().as_secs_f64() < min_s {
        result = Some(decompose(&psi, &setup.truncation)?.result);
        runs += 1;
    }
    let reduced_s = t.elapsed().as_secs_f64() / runs as f64;
    let reduced = result.expect("at least one run").expanded_spectrum();

    let t = Instant::now();
    let dense = brute_force_spectrum_tensor(&psi)?;
    let oracle_s = t.elapsed().as_secs_f64();

    let top = dense[0];
    let max_dev = dense.iter().zip(&reduced).take(50).map(|(a, b)| (a - b).abs() / top).fold(0.0, f64::max);
    Ok(BenchRow { n, reduced_s, oracle_s, ratio: oracle_s / reduced_s, max_dev })
}
