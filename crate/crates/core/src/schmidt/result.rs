use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::kernel::KernelDecomposition;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    LowGain,
    HighGain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtEntry {
    pub l: usize,
    pub m: usize,
    pub lambda: f64,
    pub degeneracy: u32,
    /// Idler phase relative to the signal mode; absent for coherent modes.
    pub beta: Option<f64>,
    /// Largest `|v - e^{i beta} u|` after alignment.
    pub phase_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SchmidtResult {
    pub regime: Regime,
    pub grid: GridSpec,
    /// Sorted by `l`, then `m`.
    pub entries: Vec<SchmidtEntry>,
    /// `modes[j]` belongs to `entries[j]`; orthonormal under `q dq domega`.
    pub modes: Vec<Vec<C64>>,
    pub k: f64,
    /// Degeneracy-weighted raw weight captured before renormalization.
    pub captured: f64,
}

pub fn degeneracy(l: usize) -> u32 {
    if l == 0 {
        1
    } else {
        2
    }
}

impl SchmidtResult {
    /// Builds a result from unnormalized per-entry weights, renormalizing
    /// so that the degeneracy-weighted sum is one.
    pub(crate) fn from_raw(regime: Regime, grid: GridSpec, mut entries: Vec<SchmidtEntry>, modes: Vec<Vec<C64>>) -> Result<Self> {
        let captured: f64 = entries.iter().map(|e| e.degeneracy as f64 * e.lambda).sum();
        if !(captured > 0.0 && captured.is_finite()) {
            return Err(Error::Numerical(format!("Schmidt weights sum to {captured}")));
        }
        entries.iter_mut().for_each(|e| e.lambda /= captured);
        let purity: f64 = entries.iter().map(|e| e.degeneracy as f64 * e.lambda * e.lambda).sum();
        Ok(SchmidtResult { regime, grid, entries, modes, k: 1.0 / purity, captured })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, l: usize, m: usize) -> Result<usize> {
        self.entries
            .iter()
            .position(|e| e.l == l && e.m == m)
            .ok_or_else(|| Error::Lookup(format!("mode (l = {l}, m = {m}) not retained")))
    }

    pub fn lambda(&self, l: usize, m: usize) -> Result<f64> {
        Ok(self.entries[self.position(l, m)?].lambda)
    }

    pub fn mode(&self, l: usize, m: usize) -> Result<&[C64]> {
        Ok(&self.modes[self.position(l, m)?])
    }

    pub fn max_l(&self) -> usize {
        self.entries.iter().map(|e| e.l).max().unwrap_or(0)
    }

    pub fn lambda_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.degeneracy as f64 * e.lambda).sum()
    }

    /// Weights with each `l > 0` entry listed twice, largest first.
    pub fn expanded_spectrum(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.degeneracy {
                out.push(e.lambda);
            }
        }
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// `u_lm(q, omega) e^{i l phi}` sampled at `phi_samples`; layout
    /// `[mu][phi]`.
    pub fn reconstruct_mode(&self, l: usize, m: usize, phi_samples: &[f64]) -> Result<Vec<C64>> {
        let u = self.mode(l, m)?;
        let mut out = Vec::with_capacity(u.len() * phi_samples.len());
        for z in u {
            for &phi in phi_samples {
                out.push(z * C64::from_polar(1.0, l as f64 * phi));
            }
        }
        Ok(out)
    }

    /// Gram deviation `max |<u_m, u_n> - delta_mn|` within each `l`.
    pub fn gram_defect(&self) -> f64 {
        let w = self.grid.weights();
        let mut worst = 0.0f64;
        for l in 0..=self.max_l() {
            let idx: Vec<usize> = (0..self.len()).filter(|&j| self.entries[j].l == l).collect();
            for (a, &i) in idx.iter().enumerate() {
                for &j in &idx[a..] {
                    let ip: C64 = self.modes[i].iter().zip(&self.modes[j]).zip(&w).map(|((x, y), w)| x.conj() * y * w).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((ip - target).norm());
                }
            }
        }
        worst
    }

    /// Rebuilds the amplitude on the grid from the retained terms, with the
    /// raw (pre-normalization) weights restored.
    pub fn reconstruct_state(&self) -> Result<Vec<C64>> {
        if self.regime != Regime::LowGain {
            return Err(Error::Lookup("coherent-mode results carry no idler modes".into()));
        }
        let (p, m) = (self.grid.dim(), self.grid.n_phi);
        let cos = self.grid.cos_table();
        let mut out = vec![C64::new(0.0, 0.0); p * p * m];
        for (e, u) in self.entries.iter().zip(&self.modes) {
            let beta = e.beta.unwrap_or(0.0);
            let amp = (e.lambda * self.captured).sqrt() / (2.0 * PI);
            let rot = C64::from_polar(amp, beta);
            for ms in 0..p {
                for mi in 0..p {
                    let base = u[ms] * u[mi] * rot;
                    let line = &mut out[(ms * p + mi) * m..(ms * p + mi + 1) * m];
                    for (k, slot) in line.iter_mut().enumerate() {
                        // e^{i l phi} + e^{-i l phi} for the folded +-l pair.
                        *slot += if e.l == 0 { base } else { base * (2.0 * cos[(e.l * k) % m]) };
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Collects per-l decompositions into one normalized spectrum, dropping
/// singular values below `tol` times the largest over all `l`.
pub fn assemble(parts: Vec<KernelDecomposition>, tol: f64) -> Result<SchmidtResult> {
    let grid = match parts.first() {
        Some(p) => p.grid.clone(),
        None => return Err(Error::Numerical("nothing to assemble".into())),
    };
    if parts.iter().any(|p| p.grid != grid) {
        return Err(Error::Config("per-l decompositions use different grids".into()));
    }
    let mut parts = parts;
    parts.sort_by_key(|p| p.l);
    let floor = tol * parts.iter().filter_map(|p| p.singular_values.first()).cloned().fold(0.0, f64::max);
    let mut entries = Vec::new();
    let mut modes = Vec::new();
    for part in &parts {
        for m in 0..part.rank() {
            let s = part.singular_values[m];
            if s <= floor {
                break;
            }
            let (beta, resid) = part.phase_alignment(m);
            entries.push(SchmidtEntry {
                l: part.l,
                m,
                lambda: (2.0 * PI * s).powi(2),
                degeneracy: degeneracy(part.l),
                beta: Some(beta),
                phase_residual: Some(resid),
            });
            modes.push(part.left_mode(m));
        }
    }
    SchmidtResult::from_raw(Regime::LowGain, grid, entries, modes)
}
