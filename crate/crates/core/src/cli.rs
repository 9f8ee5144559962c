//! Command implementations behind the `stschmidt` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::analysis::{nonseparability, sweep as run_sweep, SweepTable};
use crate::bench::{benchmark, BenchRow};
use crate::biphoton::{boundary_ratio, marginal_intensity, BiphotonTensor};
use crate::config::{RegimeChoice, RunConfig, Source};
use crate::correlation::{schmidt_number_g1, schmidt_number_reduced};
use crate::error::{Error, Result};
use crate::export::{self, RunArtifacts, Summary};
use crate::highgain::{self, coherent_invariants};
use crate::oracle::{brute_force_k, brute_force_spectrum_tensor, check_size};
use crate::schmidt::{check_invariants, decompose_with_weights, InvariantReport, SchmidtResult};

/// Edge-to-peak marginal intensity above which the window is reported as clipping the state.
pub const BOUNDARY_WARN: f64 = 1e-4;

pub struct DecomposeOutcome {
    pub summary: Summary,
    pub report: InvariantReport,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Product of identical Gaussians in `(q, omega)`, independent of angle.
pub fn separable_state(cfg: &RunConfig) -> Result<BiphotonTensor> {
    let grid = cfg.grid_spec()?;
    let (sq, sw, w0) = (grid.q_max / 3.0, grid.omega_half_width / 3.0, grid.omega_center);
    let f = move |q: f64, w: f64| (-(q / sq).powi(2) - ((w - w0) / sw).powi(2)).exp();
    BiphotonTensor::from_fn(grid, move |qs, ws, qi, wi, _| C64::new(f(qs, ws) * f(qi, wi), 0.0))
}

pub fn build_state(cfg: &RunConfig) -> Result<BiphotonTensor> {
    match cfg.source {
        Source::Spdc => cfg.low_gain()?.build(),
        Source::Separable => separable_state(cfg),
    }
}

fn nonseparabilities(r: &SchmidtResult) -> Result<Vec<f64>> {
    r.modes.iter().map(|u| nonseparability(u, &r.grid)).collect()
}

/// Runs the configured decomposition and writes its artifacts to `out`.
/// Artifacts are written even when an invariant fails; the caller decides
/// the exit status from `report`.
pub fn decompose(cfg: &RunConfig, out: &Path) -> Result<DecomposeOutcome> {
    let hash = cfg.hash();
    let (result, intensity, report, k_g1, extra) = match cfg.regime {
        RegimeChoice::LowGain => {
            let psi = build_state(cfg)?;
            let trunc = cfg.truncation;
            let dec = decompose_with_weights(&psi, &trunc, &psi.grid().weights())?;
            let report = check_invariants(&psi, &dec);
            let k_g1 = schmidt_number_reduced(&psi)?;
            (dec.result, marginal_intensity(&psi), report, k_g1, None)
        }
        RegimeChoice::HighGain => {
            let setup = cfg.high_gain()?;
            let (hg, modes) = highgain::run(&setup)?;
            let report = coherent_invariants(&hg.g1, &modes)?;
            let k_g1 = schmidt_number_g1(&hg.g1)?;
            (modes, hg.g1.diagonal(), report, k_g1, Some((hg.intensity, hg.quadrature_error)))
        }
    };
    let edge = boundary_ratio(&intensity, &result.grid);
    let mut warnings = Vec::new();
    if edge > BOUNDARY_WARN {
        warnings.push(format!(
            "marginal intensity on the window edge is {edge:.2e} of its peak; enlarge q_max or omega_half_width"
        ));
    }
    let summary = Summary {
        config_sha256: hash.clone(),
        regime: match cfg.regime {
            RegimeChoice::LowGain => "low-gain".into(),
            RegimeChoice::HighGain => "high-gain".into(),
        },
        schmidt_number: result.k,
        schmidt_number_g1: k_g1,
        lambda_sum: result.lambda_sum(),
        captured: result.captured,
        retained_modes: result.len(),
        boundary_ratio: edge,
        integrated_intensity: extra.map(|e| e.0),
        quadrature_error: extra.map(|e| e.1),
        invariants: report.checks.clone(),
        invariants_pass: report.all_pass(),
    };
    let nonsep = nonseparabilities(&result)?;
    let files = export::write_run(
        out,
        &RunArtifacts { hash: &hash, result: &result, nonseparability: &nonsep, intensity: &intensity, summary: &summary },
    )?;
    Ok(DecomposeOutcome { summary, report, files, warnings })
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub compared: usize,
    /// Largest `|reduced - dense| / dense` over the compared weights.
    pub spectrum_deviation: f64,
    pub spectrum_tolerance: f64,
    pub k_spectrum: f64,
    pub k_g1: f64,
    pub k_brute: f64,
    /// Largest pairwise relative difference among the three K values.
    pub k_spread: f64,
    pub k_tolerance: f64,
    pub pass: bool,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "spectrum  top {:>3}  max rel dev {:.3e} (tol {:.0e})  {}",
            self.compared,
            self.spectrum_deviation,
            self.spectrum_tolerance,
            verdict(self.spectrum_deviation < self.spectrum_tolerance)
        )?;
        writeln!(
            f,
            "K         spectrum {:.10}  g1 {:.10}  direct {:.10}  spread {:.3e} (tol {:.0e})  {}",
            self.k_spectrum,
            self.k_g1,
            self.k_brute,
            self.k_spread,
            self.k_tolerance,
            verdict(self.k_spread < self.k_tolerance)
        )?;
        write!(f, "overall   {}", verdict(self.pass))
    }
}

pub const ORACLE_TOP: usize = 50;
pub const ORACLE_TOL: f64 = 1e-8;
pub const K_TOL: f64 = 1e-2;

fn spread(ks: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in ks.iter().enumerate() {
        for b in &ks[i + 1..] {
            worst = worst.max((a - b).abs() / a.min(*b));
        }
    }
    worst
}

/// Compares the reduced pipeline with the dense oracle. `corrupt_weights`
/// feeds uniform pair weights to the reduced path, a negative control
/// that must fail.
pub fn validate(cfg: &RunConfig, corrupt_weights: bool) -> Result<ValidationReport> {
    if cfg.regime != RegimeChoice::LowGain {
        return Err(Error::Config("validation compares low-gain amplitudes only".into()));
    }
    let grid = cfg.grid_spec()?;
    check_size(&grid)?;
    let psi = build_state(cfg)?;
    let mut weights = grid.weights();
    if corrupt_weights {
        let mean = weights.iter().sum::<f64>() / weights.len() as f64;
        weights.iter_mut().for_each(|w| *w = mean);
    }
    let reduced = decompose_with_weights(&psi, &cfg.truncation, &weights)?.result;
    let dense = brute_force_spectrum_tensor(&psi)?;
    let ours = reduced.expanded_spectrum();
    let compared = ORACLE_TOP.min(dense.len()).min(ours.len());
    let spectrum_deviation = dense
        .iter()
        .zip(&ours)
        .take(compared)
        .map(|(d, r)| (r - d).abs() / d)
        .fold(0.0, f64::max);
    let (k_spectrum, k_g1, k_brute) = (reduced.k, schmidt_number_reduced(&psi)?, brute_force_k(&psi)?);
    let k_spread = spread(&[k_spectrum, k_g1, k_brute]);
    let pass = compared == ORACLE_TOP.min(dense.len()) && spectrum_deviation < ORACLE_TOL && k_spread < K_TOL;
    Ok(ValidationReport {
        compared,
        spectrum_deviation,
        spectrum_tolerance: ORACLE_TOL,
        k_spectrum,
        k_g1,
        k_brute,
        k_spread,
        k_tolerance: K_TOL,
        pass,
    })
}

pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<(SweepTable, Vec<PathBuf>)> {
    let spec = cfg.sweep.as_ref().ok_or_else(|| Error::Config("no [sweep] section in the configuration".into()))?;
    if spec.values.is_empty() {
        return Err(Error::Config("sweep.values is empty".into()));
    }
    let table = run_sweep(&cfg.scenario()?, spec.axis, &spec.values, spec.method)?;
    let files = export::write_sweep(out, &table, &cfg.hash())?;
    Ok((table, files))
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut s = String::from("n,reduced_s,oracle_s,ratio,max_dev\n");
    for r in rows {
        writeln!(s, "{},{:.6e},{:.6e},{:.3},{:.3e}", r.n, r.reduced_s, r.oracle_s, r.ratio, r.max_dev).unwrap();
    }
    s
}

pub fn bench(sizes: &[usize], min_s: f64) -> Result<Vec<BenchRow>> {
    benchmark(sizes, min_s)
}
