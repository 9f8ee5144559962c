use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::biphoton::BiphotonTensor;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Measure-weighted azimuthal harmonic `sqrt(w_mu w_nu) alpha_l(mu, nu)`.
#[derive(Debug, Clone)]
pub struct AzimuthalKernel {
    pub l: usize,
    matrix: Mat<C64>,
    weights: Vec<f64>,
    grid: GridSpec,
}

impl AzimuthalKernel {
    /// Wraps an already weighted matrix; rows and columns follow the grid's
    /// flat `(q, omega)` index.
    pub fn from_weighted(l: usize, matrix: Mat<C64>, weights: Vec<f64>, grid: GridSpec) -> Result<Self> {
        let p = weights.len();
        if matrix.nrows() != p || matrix.ncols() != p || grid.dim() != p {
            return Err(Error::Config(format!(
                "kernel {}x{} does not fit a grid of dimension {p}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(AzimuthalKernel { l, matrix, weights, grid })
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Unweighted `alpha_l(mu, nu)`.
    pub fn alpha(&self, mu: usize, nu: usize) -> C64 {
        self.matrix[(mu, nu)] / (self.weights[mu] * self.weights[nu]).sqrt()
    }

    /// `max |A - A^T| / max |A|`.
    pub fn symmetry_defect(&self) -> f64 {
        let p = self.dim();
        let mut peak = 0.0f64;
        let mut worst = 0.0f64;
        for i in 0..p {
            for j in 0..p {
                peak = peak.max(self.matrix[(i, j)].norm());
                if j > i {
                    worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).norm());
                }
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            worst / peak
        }
    }

    /// Hilbert-Schmidt norm squared in the continuum normalization, equal to
    /// the sum of this harmonic's Schmidt weights.
    pub fn hs_norm_sq(&self) -> f64 {
        (2.0 * PI).powi(2) * self.matrix.squared_norm_l2()
    }
}

/// Weighted harmonics for every `l` in `ls`, computed in one pass of
/// length-M transforms over the azimuthal axis.
pub(crate) fn weighted_harmonics(psi: &BiphotonTensor, ls: &[usize], weights: &[f64]) -> Vec<Mat<C64>> {
    let grid = psi.grid();
    let (p, m) = (grid.dim(), grid.n_phi);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    let sqw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut out: Vec<Mat<C64>> = ls.iter().map(|_| Mat::zeros(p, p)).collect();
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let inv_m = 1.0 / m as f64;
    for ms in 0..p {
        for mi in 0..p {
            buf.copy_from_slice(psi.line(ms, mi));
            fft.process_with_scratch(&mut buf, &mut scratch);
            let s = sqw[ms] * sqw[mi] * inv_m;
            for (mat, &l) in out.iter_mut().zip(ls) {
                mat[(ms, mi)] = buf[l] * s;
            }
        }
    }
    out
}

/// `alpha_l` for `l = 0..=l_max`, weighted by the polar measure.
pub fn azimuthal_kernels(psi: &BiphotonTensor, l_max: usize) -> Result<Vec<AzimuthalKernel>> {
    azimuthal_kernels_with_weights(psi, l_max, &psi.grid().weights())
}

/// As [`azimuthal_kernels`] with caller-supplied pair weights.
pub fn azimuthal_kernels_with_weights(psi: &BiphotonTensor, l_max: usize, weights: &[f64]) -> Result<Vec<AzimuthalKernel>> {
    let grid = psi.grid();
    grid.check_l_max(l_max)?;
    let ls: Vec<usize> = (0..=l_max).collect();
    let mats = weighted_harmonics(psi, &ls, weights);
    mats.into_iter()
        .zip(ls)
        .map(|(mat, l)| AzimuthalKernel::from_weighted(l, mat, weights.to_vec(), grid.clone()))
        .collect()
}

/// Parseval bookkeeping across all M harmonics.
#[derive(Debug, Clone, Copy)]
pub struct ParsevalReport {
    /// Measure-weighted norm of the tensor.
    pub norm: f64,
    /// Degeneracy-folded sum of harmonic HS norms.
    pub harmonic_sum: f64,
    /// Folded weight carried by harmonics above `l_max`.
    pub tail: f64,
}

impl ParsevalReport {
    pub fn defect(&self) -> f64 {
        (self.norm - self.harmonic_sum).abs() / self.norm
    }
}

pub fn parseval(psi: &BiphotonTensor, l_max: usize) -> ParsevalReport {
    let grid = psi.grid();
    let (p, m) = (grid.dim(), grid.n_phi);
    let w = grid.weights();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let mut power = vec![0.0; m];
    let mut direct = 0.0;
    for ms in 0..p {
        for mi in 0..p {
            buf.copy_from_slice(psi.line(ms, mi));
            let ww = w[ms] * w[mi];
            direct += ww * buf.iter().map(|v| v.norm_sqr()).sum::<f64>();
            fft.process(&mut buf);
            for (acc, v) in power.iter_mut().zip(&buf) {
                *acc += ww * v.norm_sqr();
            }
        }
    }
    let norm = 2.0 * PI * grid.phi_weight() * direct;
    // |FFT|^2 = M^2 |alpha|^2 and the harmonic norm is (2 pi)^2 sum w w |alpha|^2.
    let scale = (2.0 * PI).powi(2) / (m * m) as f64;
    let mut harmonic_sum = 0.0;
    let mut tail = 0.0;
    for l in 0..=m / 2 {
        let folded = if l == 0 || 2 * l == m { power[l] } else { power[l] + power[m - l] };
        harmonic_sum += scale * folded;
        if l > l_max {
            tail += scale * folded;
        }
    }
    ParsevalReport { norm, harmonic_sum, tail }
}
