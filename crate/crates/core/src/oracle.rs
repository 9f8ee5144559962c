//! Brute-force references for small grids. Everything here is sequential
//! and avoids the azimuthal reduction on purpose.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::biphoton::{pump_amplitude, sinc, BiphotonTensor, PumpLowGain};
use crate::dispersion::{delta_kz, CrystalConfig};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg::singular_values;

/// Largest per-axis size the dense oracle accepts.
pub const SIZE_GUARD: usize = 16;

pub fn check_size(grid: &GridSpec) -> Result<()> {
    let worst = grid.n_q.max(grid.n_omega).max(grid.n_phi);
    if worst > SIZE_GUARD {
        return Err(Error::SizeGuard(format!(
            "grid ({} q x {} omega x {} phi) exceeds the oracle limit of {SIZE_GUARD} samples per axis",
            grid.n_q, grid.n_omega, grid.n_phi
        )));
    }
    Ok(())
}

fn dense_singular_values(a: &Mat<C64>) -> Result<Vec<f64>> {
    let mut out = singular_values(a)?;
    out.iter_mut().for_each(|s| *s = s.abs());
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

fn spectrum_from_matrix(a: &Mat<C64>) -> Result<Vec<f64>> {
    let s = dense_singular_values(a)?;
    let total: f64 = s.iter().map(|x| x * x).sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("state has zero norm".into()));
    }
    Ok(s.iter().map(|x| x * x / total).collect())
}

/// Dense spectrum of `f(q_s, phi_s, w_s, q_i, phi_i, w_i)` sampled on the
/// explicit six-axis grid, rows `(q_s, phi_s, w_s)` and columns the idler.
pub fn brute_force_spectrum<F>(grid: &GridSpec, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64, f64, f64, f64, f64, f64) -> C64,
{
    check_size(grid)?;
    let (nq, nw, m) = (grid.n_q, grid.n_omega, grid.n_phi);
    let n = nq * m * nw;
    let (dq, dw, dphi) = (grid.dq(), grid.d_omega(), 2.0 * PI / m as f64);
    let axis = |r: usize| {
        let (iq, rest) = (r / (m * nw), r % (m * nw));
        let (k, iw) = (rest / nw, rest % nw);
        let q = grid.q(iq);
        (q, grid.phi(k), grid.omega(iw), (q * dq * dphi * dw).sqrt())
    };
    let coords: Vec<(f64, f64, f64, f64)> = (0..n).map(axis).collect();
    let a = Mat::from_fn(n, n, |r, c| {
        let (qs, ps, ws, sr) = coords[r];
        let (qi, pi, wi, sc) = coords[c];
        f(qs, ps, ws, qi, pi, wi) * (sr * sc)
    });
    spectrum_from_matrix(&a)
}

/// As [`brute_force_spectrum`], reading `psi(dphi = phi_s - phi_i)` from a
/// built tensor.
pub fn brute_force_spectrum_tensor(psi: &BiphotonTensor) -> Result<Vec<f64>> {
    let grid = psi.grid();
    check_size(grid)?;
    let (nq, nw, m) = (grid.n_q, grid.n_omega, grid.n_phi);
    let n = nq * m * nw;
    let (dq, dw, dphi) = (grid.dq(), grid.d_omega(), 2.0 * PI / m as f64);
    let split = |r: usize| {
        let (iq, rest) = (r / (m * nw), r % (m * nw));
        let (k, iw) = (rest / nw, rest % nw);
        (grid.index(iq, iw), k, (grid.q(iq) * dq * dphi * dw).sqrt())
    };
    let idx: Vec<(usize, usize, f64)> = (0..n).map(split).collect();
    let a = Mat::from_fn(n, n, |r, c| {
        let (ms, ks, sr) = idx[r];
        let (mi, ki, sc) = idx[c];
        psi.get(ms, mi, (ks + m - ki) % m) * (sr * sc)
    });
    spectrum_from_matrix(&a)
}

/// Physical amplitude evaluated pointwise from Cartesian transverse
/// wavevectors, for use with [`brute_force_spectrum`].
pub fn spdc_amplitude(pump: PumpLowGain, crystal: CrystalConfig) -> impl Fn(f64, f64, f64, f64, f64, f64) -> C64 {
    move |qs, ps, ws, qi, pi, wi| {
        let (sx, sy) = (qs * ps.cos(), qs * ps.sin());
        let (ix, iy) = (qi * pi.cos(), qi * pi.sin());
        let qp = (sx + ix).hypot(sy + iy);
        let dk = delta_kz(qp, qs, qi, ws, wi, &crystal, pump.lambda_p0).expect("grid checked by caller");
        let x = dk * crystal.length / 2.0;
        C64::from_polar(pump_amplitude(qp, ws + wi, &pump) * sinc(x), x)
    }
}

/// Schmidt number by direct summation of the correlation integral,
/// `G(mu, mu', k) = (2 pi / M) sum_j sum_nu w_nu psi(mu, nu, j + k) conj psi(mu', nu, j)`.
pub fn brute_force_k(psi: &BiphotonTensor) -> Result<f64> {
    let grid = psi.grid();
    let (p, m) = (grid.dim(), grid.n_phi);
    let w = grid.weights();
    let dphi = 2.0 * PI / m as f64;
    let mut trace = 0.0;
    let mut hs = 0.0;
    for mu in 0..p {
        for nu in mu..p {
            for k in 0..m {
                let mut g = C64::new(0.0, 0.0);
                for x in 0..p {
                    let (a, b) = (psi.line(mu, x), psi.line(nu, x));
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..m {
                        s += a[(j + k) % m] * b[j].conj();
                    }
                    g += s * w[x];
                }
                g *= dphi;
                let mult = if mu == nu { 1.0 } else { 2.0 };
                hs += mult * w[mu] * w[nu] * g.norm_sqr();
                if mu == nu && k == 0 {
                    trace += w[mu] * g.re;
                }
            }
        }
    }
    trace *= 2.0 * PI;
    hs *= 2.0 * PI * dphi;
    if !(hs > 0.0) {
        return Err(Error::Numerical("state has zero norm".into()));
    }
    Ok(trace * trace / hs)
}

#[derive(Debug, Clone)]
pub struct GaussianOracle {
    /// Mean of `lambda_{n+1} / lambda_n` over the first ten levels.
    pub ratio: f64,
    /// Largest relative departure of a level ratio from the mean.
    pub geometric_defect: f64,
    pub head: Vec<f64>,
}

/// Dense spectrum of the sampled kernel `exp[-a (x + y)^2 - b (x - y)^2]`.
pub fn gaussian_1d_oracle(a: f64, b: f64) -> Result<GaussianOracle> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("Gaussian widths a = {a}, b = {b} must be positive")));
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let half = 7.0 / lo.sqrt();
    let n = ((2.0 * half * hi.sqrt() * 6.0) as usize).clamp(300, 1200);
    let dx = 2.0 * half / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| -half + (i as f64 + 0.5) * dx).collect();
    let k = Mat::from_fn(n, n, |i, j| {
        let (x, y) = (xs[i], xs[j]);
        C64::new((-a * (x + y).powi(2) - b * (x - y).powi(2)).exp() * dx, 0.0)
    });
    let spec = spectrum_from_matrix(&k)?;
    let head: Vec<f64> = spec.iter().take(11).cloned().collect();
    let ratios: Vec<f64> = head.windows(2).map(|w| w[1] / w[0]).collect();
    let ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let geometric_defect = if ratio > 0.0 {
        ratios.iter().map(|r| (r - ratio).abs() / ratio).fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(GaussianOracle { ratio, geometric_defect, head })
}
