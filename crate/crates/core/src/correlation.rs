//! Reduced first-order correlation `G(mu, mu', dphi)` of the signal field
//! and the Schmidt number obtained from it without mode extraction.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::biphoton::BiphotonTensor;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::schmidt::weighted_harmonics;

/// Layout `[mu][mu'][k]`, azimuthal index fastest, with
/// `dphi = phi_s - phi_s'`.
#[derive(Debug, Clone)]
pub struct CorrelationTensor {
    values: Vec<C64>,
    grid: GridSpec,
    trace: f64,
}

impl CorrelationTensor {
    pub fn from_values(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        let p = grid.dim();
        if values.len() != p * p * grid.n_phi {
            return Err(Error::Config(format!("correlation has {} samples, grid needs {}", values.len(), p * p * grid.n_phi)));
        }
        let mut g = CorrelationTensor { values, grid, trace: 0.0 };
        g.trace = g.measure_trace();
        Ok(g)
    }

    fn measure_trace(&self) -> f64 {
        let w = self.grid.weights();
        2.0 * PI * (0..self.grid.dim()).map(|mu| w[mu] * self.get(mu, mu, 0).re).sum::<f64>()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `2 pi sum_mu w_mu G(mu, mu, 0)`.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn get(&self, mu: usize, nu: usize, k: usize) -> C64 {
        let (p, m) = (self.grid.dim(), self.grid.n_phi);
        self.values[(mu * p + nu) * m + k]
    }

    pub fn line(&self, mu: usize, nu: usize) -> &[C64] {
        let (p, m) = (self.grid.dim(), self.grid.n_phi);
        let s = (mu * p + nu) * m;
        &self.values[s..s + m]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.grid.dim()).map(|mu| self.get(mu, mu, 0).re).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        CorrelationTensor { values: self.values.iter().map(|v| v * c).collect(), grid: self.grid.clone(), trace: self.trace * c }
    }

    /// Copy with unit measure trace.
    pub fn normalized(&self) -> Result<Self> {
        if !(self.trace > 0.0 && self.trace.is_finite()) {
            return Err(Error::Numerical(format!("correlation trace {} cannot be normalized", self.trace)));
        }
        Ok(self.scaled(1.0 / self.trace))
    }

    /// Largest `|G(mu, nu, k) - conj G(nu, mu, -k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let (p, m) = (self.grid.dim(), self.grid.n_phi);
        let mut worst = 0.0f64;
        for mu in 0..p {
            for nu in mu..p {
                for k in 0..m {
                    let d = self.get(mu, nu, k) - self.get(nu, mu, (m - k) % m).conj();
                    worst = worst.max(d.norm());
                }
            }
        }
        worst
    }

    /// `|<A, B>| / (|A| |B|)` under the five-variable measure.
    pub fn correlation_coefficient(&self, other: &CorrelationTensor) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Config("correlation tensors live on different grids".into()));
        }
        let w = self.grid.weights();
        let (p, m) = (self.grid.dim(), self.grid.n_phi);
        let (mut ab, mut aa, mut bb) = (C64::new(0.0, 0.0), 0.0, 0.0);
        for mu in 0..p {
            for nu in 0..p {
                let ww = w[mu] * w[nu];
                for k in 0..m {
                    let (x, y) = (self.get(mu, nu, k), other.get(mu, nu, k));
                    ab += x.conj() * y * ww;
                    aa += x.norm_sqr() * ww;
                    bb += y.norm_sqr() * ww;
                }
            }
        }
        Ok(ab.norm() / (aa * bb).sqrt())
    }

    /// Measure-weighted harmonic `sqrt(w w') f_l` with
    /// `f_l = (1/M) sum_k G_k e^{-2 pi i l k / M}`.
    pub fn weighted_harmonic(&self, ls: &[usize]) -> Vec<Mat<C64>> {
        let (p, m) = (self.grid.dim(), self.grid.n_phi);
        let sqw: Vec<f64> = self.grid.weights().iter().map(|w| w.sqrt()).collect();
        let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
        let mut out: Vec<Mat<C64>> = ls.iter().map(|_| Mat::zeros(p, p)).collect();
        let mut buf = vec![C64::new(0.0, 0.0); m];
        for mu in 0..p {
            for nu in 0..p {
                buf.copy_from_slice(self.line(mu, nu));
                fft.process(&mut buf);
                let s = sqw[mu] * sqw[nu] / m as f64;
                for (mat, &l) in out.iter_mut().zip(ls) {
                    mat[(mu, nu)] = buf[l] * s;
                }
            }
        }
        out
    }
}

/// Signal correlation from the two-photon amplitude,
/// `G(mu, mu', dphi) = 2 pi int w_nu dalpha psi(mu, nu, alpha + dphi) conj psi(mu', nu, alpha)`,
/// assembled harmonic by harmonic: `f_l = 2 pi alpha_l W alpha_l^H`.
pub fn g1_from_psi(psi: &BiphotonTensor) -> CorrelationTensor {
    let grid = psi.grid().clone();
    let (p, m) = (grid.dim(), grid.n_phi);
    let w = grid.weights();
    let ls: Vec<usize> = (0..m).collect();
    let harmonics = weighted_harmonics(psi, &ls, &w);
    let f: Vec<Mat<C64>> = harmonics.par_iter().map(|a| (a * a.adjoint()) * faer::Scale(C64::new(2.0 * PI, 0.0))).collect();
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(m);
    let mut values = vec![C64::new(0.0, 0.0); p * p * m];
    let mut buf = vec![C64::new(0.0, 0.0); m];
    for mu in 0..p {
        for nu in 0..p {
            let unweight = 1.0 / (w[mu] * w[nu]).sqrt();
            for l in 0..m {
                buf[l] = f[l][(mu, nu)] * unweight;
            }
            ifft.process(&mut buf);
            values[(mu * p + nu) * m..(mu * p + nu + 1) * m].copy_from_slice(&buf);
        }
    }
    CorrelationTensor::from_values(grid, values).expect("shape fixed by grid")
}

/// `K = (Tr G)^2 / (2 pi int |G|^2)` over `q dq domega q' dq' domega' ddphi`.
pub fn schmidt_number_g1(g1: &CorrelationTensor) -> Result<f64> {
    let grid = g1.grid();
    let w = grid.weights();
    let p = grid.dim();
    let mut hs = 0.0;
    for mu in 0..p {
        for nu in 0..p {
            hs += w[mu] * w[nu] * g1.line(mu, nu).iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
    }
    hs *= 2.0 * PI * grid.phi_weight();
    if !(hs > 0.0) || g1.trace() == 0.0 {
        return Err(Error::Numerical("correlation function has zero norm".into()));
    }
    Ok(g1.trace().powi(2) / hs)
}

/// The same integral evaluated in harmonic space,
/// `K^-1 = (2 pi)^4 sum_l |A_l A_l^H|_F^2 / |psi|^4`, without forming `G`.
/// Exactly even amplitudes fold `l` and `M - l`.
pub fn schmidt_number_reduced(psi: &BiphotonTensor) -> Result<f64> {
    let grid = psi.grid();
    let m = grid.n_phi;
    let even = psi.evenness_defect() == 0.0;
    let ls: Vec<usize> = if even { (0..=m / 2).collect() } else { (0..m).collect() };
    let harmonics = weighted_harmonics(psi, &ls, &grid.weights());
    let terms: Vec<(f64, f64)> = harmonics
        .par_iter()
        .map(|a| {
            let f = a * a.adjoint();
            (f.squared_norm_l2(), a.squared_norm_l2())
        })
        .collect();
    let (mut sum4, mut sum2) = (0.0, 0.0);
    for (&l, (f2, a2)) in ls.iter().zip(terms) {
        let fold = if even && l != 0 && 2 * l != m { 2.0 } else { 1.0 };
        sum4 += fold * f2;
        sum2 += fold * a2;
    }
    if !(sum4 > 0.0) {
        return Err(Error::Numerical("amplitude has zero norm".into()));
    }
    Ok(sum2 * sum2 / sum4)
}
