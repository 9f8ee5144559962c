//! High-gain signal correlation from the sinh gain kernel and its
//! azimuthal coherent-mode decomposition.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{schmidt_number_g1, CorrelationTensor};
use crate::dispersion::{central_delta_kz, kz, omega_from_wavelength, CrystalConfig};
use crate::error::{Error, Leg, Result};
use crate::grid::GridSpec;
use crate::linalg::hermitian_eigen;
use crate::quadrature::{bessel_j0, GaussLegendre};
use crate::schmidt::{degeneracy, fix_phase, ordering, InvariantReport, Regime, SchmidtEntry, SchmidtResult, Truncation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpHighGain {
    pub g: f64,
    pub w_p: f64,
    pub delta_t: f64,
    pub lambda_p0: f64,
}

impl PumpHighGain {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("w_p", self.w_p), ("delta_t", self.delta_t), ("lambda_p0", self.lambda_p0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("pump {name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    pub fn omega_p0(&self) -> f64 {
        omega_from_wavelength(self.lambda_p0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCalibration {
    pub c2_eff: f64,
}

impl GainCalibration {
    /// Chosen so that `Gamma L = g` at the beam centre, pulse peak and
    /// collinear degenerate phase matching.
    pub fn shipped(crystal: &CrystalConfig, lambda_p0: f64) -> Result<Self> {
        let k0 = crystal.daughter_k(omega_from_wavelength(lambda_p0) / 2.0)?;
        Ok(GainCalibration { c2_eff: k0 * k0 / (crystal.length * crystal.length) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rho_order: usize,
    pub t_order: usize,
    /// Allowed change of the checked entries when both orders are doubled,
    /// relative to the largest diagonal value.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rho_order: 64, t_order: 64, tol: 1e-6 }
    }
}

/// `|V_p(rho, t)|^2` of the coherent Gaussian pump.
pub fn pump_intensity(rho: f64, t: f64, pump: &PumpHighGain) -> f64 {
    let (r, s) = (rho / pump.w_p, t / pump.delta_t);
    pump.g * pump.g * (-2.0 * r * r - s * s).exp()
}

/// Principal square root of `C2 |V_p|^2 / (k_sz k_iz) - (dk / 2)^2`.
pub fn gamma(central_dkz: f64, kz_product: f64, rho: f64, t: f64, pump: &PumpHighGain, cal: &GainCalibration) -> C64 {
    let bracket = cal.c2_eff / kz_product * pump_intensity(rho, t, pump) - 0.25 * central_dkz * central_dkz;
    C64::new(bracket, 0.0).sqrt()
}

/// `sinh(Gamma L) / Gamma`, real for real `Gamma^2`.
pub fn sinhc(gamma: C64, length: f64) -> f64 {
    let z = gamma * length;
    if z.norm() < 1e-4 {
        sinhc_series(z, length)
    } else {
        sinhc_direct(gamma, length)
    }
}

fn sinhc_series(z: C64, length: f64) -> f64 {
    let z2 = z * z;
    (length * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0))).re
}

fn sinhc_direct(gamma: C64, length: f64) -> f64 {
    ((gamma * length).sinh() / gamma).re
}

#[derive(Debug, Clone)]
pub struct HighGainSetup {
    pub grid: GridSpec,
    pub pump: PumpHighGain,
    pub crystal: CrystalConfig,
    pub truncation: Truncation,
    pub quadrature: QuadratureSpec,
    /// Overrides the shipped calibration.
    pub c2_eff: Option<f64>,
}

impl HighGainSetup {
    pub fn calibration(&self) -> Result<GainCalibration> {
        match self.c2_eff {
            Some(c) if c > 0.0 => Ok(GainCalibration { c2_eff: c }),
            Some(c) => Err(Error::Config(format!("c2_eff = {c} must be positive"))),
            None => GainCalibration::shipped(&self.crystal, self.pump.lambda_p0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HighGainG1 {
    /// Trace-normalized correlation.
    pub g1: CorrelationTensor,
    /// Measure-weighted trace before normalization.
    pub intensity: f64,
    /// Largest change of the checked entries under doubled quadrature.
    pub quadrature_error: f64,
}

struct Kernel<'a> {
    grid: &'a GridSpec,
    pump: &'a PumpHighGain,
    cal: &'a GainCalibration,
    length: f64,
    ksz: Vec<f64>,
    kzprod: Vec<f64>,
    dk: Vec<f64>,
}

impl<'a> Kernel<'a> {
    fn new(grid: &'a GridSpec, pump: &'a PumpHighGain, crystal: &CrystalConfig, cal: &'a GainCalibration) -> Result<Self> {
        let w0 = pump.omega_p0();
        let p = grid.dim();
        let (mut ksz, mut kzprod, mut dk) = (Vec::with_capacity(p), Vec::with_capacity(p), Vec::with_capacity(p));
        for mu in 0..p {
            let (q, w) = (grid.q_of(mu), grid.omega_of(mu));
            let s = kz(crystal.daughter_k(w)?, q, Leg::Signal)?;
            let i = kz(crystal.daughter_k(w0 - w)?, q, Leg::Idler)?;
            ksz.push(s);
            kzprod.push(s * i);
            dk.push(central_delta_kz(q, w, crystal, pump.lambda_p0)?);
        }
        Ok(Kernel { grid, pump, cal, length: crystal.length, ksz, kzprod, dk })
    }

    fn gain(&self, mu: usize, rho: f64, t: f64) -> f64 {
        sinhc(gamma(self.dk[mu], self.kzprod[mu], rho, t, self.pump, self.cal), self.length)
    }

    fn prefactor(&self, mu: usize, nu: usize) -> C64 {
        C64::from_polar(1.0 / (self.ksz[mu] * self.ksz[nu]), (self.dk[mu] - self.dk[nu]) * self.length / 2.0)
    }

    fn rules(&self, n_rho: usize, n_t: usize) -> (GaussLegendre, GaussLegendre) {
        let (w, dt) = (self.pump.w_p, self.pump.delta_t);
        (GaussLegendre::on(n_rho, 0.0, 4.0 * w), GaussLegendre::on(n_t, -4.0 * dt, 4.0 * dt))
    }

    fn dq(&self, mu: usize, nu: usize, cos: f64) -> f64 {
        let (a, b) = (self.grid.q_of(mu), self.grid.q_of(nu));
        ((a * a + b * b) - 2.0 * (a * b) * cos).max(0.0).sqrt()
    }

    /// One entry by direct double quadrature.
    fn entry(&self, mu: usize, nu: usize, k: usize, n_rho: usize, n_t: usize) -> C64 {
        let (rr, rt) = self.rules(n_rho, n_t);
        let dw = self.grid.omega_of(mu) - self.grid.omega_of(nu);
        let dq = self.dq(mu, nu, self.grid.cos_table()[k]);
        let mut acc = 0.0;
        for (rho, wr) in rr.nodes.iter().zip(&rr.weights) {
            let mut h = 0.0;
            for (t, wt) in rt.nodes.iter().zip(&rt.weights) {
                h += wt * pump_intensity(*rho, *t, self.pump) * (dw * t).cos() * self.gain(mu, *rho, *t) * self.gain(nu, *rho, *t);
            }
            acc += wr * rho * 2.0 * PI * bessel_j0(dq * rho) * h;
        }
        self.prefactor(mu, nu) * acc
    }
}

pub fn build_g1(grid: &GridSpec, pump: &PumpHighGain, crystal: &CrystalConfig, cal: &GainCalibration, quad: &QuadratureSpec) -> Result<HighGainG1> {
    grid.validate()?;
    pump.validate()?;
    crystal.validate()?;
    if quad.rho_order == 0 || quad.t_order == 0 {
        return Err(Error::Config("quadrature orders must be positive".into()));
    }
    let ker = Kernel::new(grid, pump, crystal, cal)?;
    let (p, m, nq, nw) = (grid.dim(), grid.n_phi, grid.n_q, grid.n_omega);
    let (rr, rt) = ker.rules(quad.rho_order, quad.t_order);
    let (na, nb) = (rr.len(), rt.len());

    // w_rho rho w_t |V|^2 on the node grid, and the gain factor per mode.
    let mut wv = vec![0.0; na * nb];
    for a in 0..na {
        for b in 0..nb {
            wv[a * nb + b] = rr.weights[a] * rr.nodes[a] * rt.weights[b] * pump_intensity(rr.nodes[a], rt.nodes[b], pump);
        }
    }
    let gains: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|mu| {
            let mut s = vec![0.0; na * nb];
            for a in 0..na {
                for b in 0..nb {
                    s[a * nb + b] = ker.gain(mu, rr.nodes[a], rt.nodes[b]);
                }
            }
            s
        })
        .collect();

    let cos = grid.cos_table();
    let half = m / 2;
    let qpairs: Vec<(usize, usize)> = (0..nq).flat_map(|a| (a..nq).map(move |b| (a, b))).collect();
    let blocks: Vec<Vec<(usize, usize, Vec<C64>)>> = qpairs
        .par_iter()
        .map(|&(iq, jq)| {
            let (qa, qb) = (grid.q(iq), grid.q(jq));
            let mut bes = vec![0.0; (half + 1) * na];
            for k in 0..=half {
                let dq = ((qa * qa + qb * qb) - 2.0 * (qa * qb) * cos[k]).max(0.0).sqrt();
                for a in 0..na {
                    bes[k * na + a] = 2.0 * PI * bessel_j0(dq * rr.nodes[a]);
                }
            }
            let mut out = Vec::new();
            let mut h = vec![0.0; na];
            let mut cw = vec![0.0; nb];
            for iw in 0..nw {
                let jw0 = if iq == jq { iw } else { 0 };
                for jw in jw0..nw {
                    let (mu, nu) = (grid.index(iq, iw), grid.index(jq, jw));
                    let dw = grid.omega(iw) - grid.omega(jw);
                    for b in 0..nb {
                        cw[b] = (dw * rt.nodes[b]).cos();
                    }
                    let (su, sv) = (&gains[mu], &gains[nu]);
                    for a in 0..na {
                        let row = a * nb;
                        let mut acc = 0.0;
                        for b in 0..nb {
                            acc += wv[row + b] * su[row + b] * sv[row + b] * cw[b];
                        }
                        h[a] = acc;
                    }
                    let pref = ker.prefactor(mu, nu);
                    let mut line = vec![C64::new(0.0, 0.0); m];
                    for k in 0..=half {
                        let r: f64 = bes[k * na..(k + 1) * na].iter().zip(&h).map(|(j, h)| j * h).sum();
                        line[k] = pref * r;
                        line[(m - k) % m] = line[k];
                    }
                    out.push((mu, nu, line));
                }
            }
            out
        })
        .collect();

    let mut values = vec![C64::new(0.0, 0.0); p * p * m];
    for (mu, nu, line) in blocks.into_iter().flatten() {
        values[(mu * p + nu) * m..(mu * p + nu + 1) * m].copy_from_slice(&line);
        if mu != nu {
            for k in 0..m {
                values[(nu * p + mu) * m + k] = line[k].conj();
            }
        }
    }
    let raw = CorrelationTensor::from_values(grid.clone(), values)?;
    let intensity = raw.trace();

    // Convergence probe: diagonal plus the most oscillatory corners, re-evaluated at doubled orders.
    let scale = raw.diagonal().into_iter().fold(0.0, f64::max);
    let mut probes: Vec<(usize, usize, usize)> = (0..p).map(|mu| (mu, mu, 0)).collect();
    for (iq, jq) in [(0, nq - 1), (nq - 1, nq - 1)] {
        for (iw, jw) in [(0, nw - 1), (nw / 2, nw / 2)] {
            for k in [0, half] {
                probes.push((grid.index(iq, iw), grid.index(jq, jw), k));
            }
        }
    }
    let quadrature_error = probes
        .par_iter()
        .map(|&(mu, nu, k)| (ker.entry(mu, nu, k, 2 * na, 2 * nb) - raw.get(mu, nu, k)).norm() / scale)
        .reduce(|| 0.0, f64::max);
    if !(quadrature_error <= quad.tol) {
        return Err(Error::Numerical(format!(
            "gain-kernel quadrature not converged: doubling orders ({na}, {nb}) moves entries by {quadrature_error:.3e} (tolerance {:.1e})",
            quad.tol
        )));
    }
    Ok(HighGainG1 { g1: raw.normalized()?, intensity, quadrature_error })
}

/// Measure-weighted trace of an unnormalized correlation.
pub fn integrated_intensity(g1: &CorrelationTensor) -> f64 {
    g1.trace()
}

/// Eigen-expansion of each measure-weighted harmonic `f_l`; weights are
/// `2 pi` times the eigenvalues, renormalized with `l > 0` counted twice.
/// Eigenvalues are kept while `sqrt(lambda / lambda_max) > tol`, with
/// `lambda_max` the largest over all harmonics.
pub fn coherent_modes(g1: &CorrelationTensor, trunc: &Truncation) -> Result<SchmidtResult> {
    let grid = g1.grid().clone();
    grid.check_l_max(trunc.l_max)?;
    let ls: Vec<usize> = (0..=trunc.l_max).collect();
    let harmonics = g1.weighted_harmonic(&ls);
    let evds: Vec<Result<(Vec<f64>, Vec<Vec<C64>>)>> = harmonics
        .par_iter()
        .zip(&ls)
        .map(|(f, &l)| {
            let (s, u) = hermitian_eigen(f).map_err(|e| Error::Numerical(format!("l = {l}: {e}")))?;
            let p = f.nrows();
            let vals: Vec<f64> = (0..p).map(|i| 2.0 * PI * s[i]).collect();
            let vecs: Vec<Vec<C64>> = (0..p)
                .map(|c| {
                    let mut x: Vec<C64> = (0..p).map(|i| u[(i, c)]).collect();
                    fix_phase(&mut x);
                    x
                })
                .collect();
            Ok((vals, vecs))
        })
        .collect();
    let evds = evds.into_iter().collect::<Result<Vec<_>>>()?;

    let global_max = evds.iter().flat_map(|(v, _)| v.iter().cloned()).fold(0.0, f64::max);
    let w = grid.weights();
    let mut entries = Vec::new();
    let mut modes = Vec::new();
    for (&l, (vals, vecs)) in ls.iter().zip(&evds) {
        let low = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if low < -1e-8 * global_max {
            return Err(Error::Numerical(format!(
                "harmonic l = {l} has eigenvalue {low:.3e} below -1e-8 of the largest ({global_max:.3e})"
            )));
        }
        let order = ordering(vals, vecs, &grid);
        let floor = global_max * trunc.tol * trunc.tol;
        for (m, &j) in order.iter().filter(|&&j| vals[j] > floor && vals[j] > 0.0).take(trunc.m_max).enumerate() {
            entries.push(SchmidtEntry { l, m, lambda: vals[j], degeneracy: degeneracy(l), beta: None, phase_residual: None });
            modes.push(vecs[j].iter().zip(&w).map(|(x, w)| x / w.sqrt()).collect());
        }
    }
    SchmidtResult::from_raw(Regime::HighGain, grid, entries, modes)
}

/// Checks run after every high-gain decomposition.
pub fn coherent_invariants(g1: &CorrelationTensor, modes: &SchmidtResult) -> Result<InvariantReport> {
    let mut rep = InvariantReport::default();
    rep.push("lambda_sum", (modes.lambda_sum() - 1.0).abs(), 1e-10);
    let purity: f64 = modes.entries.iter().map(|e| e.degeneracy as f64 * e.lambda * e.lambda).sum();
    rep.push("schmidt_number", (modes.k * purity - 1.0).abs(), 1e-10);
    rep.push("gram", modes.gram_defect(), 1e-8);
    rep.push("hermitian", g1.hermitian_defect(), 0.0);
    let k_g1 = schmidt_number_g1(g1)?;
    rep.push("k_agreement", (modes.k - k_g1).abs() / k_g1, 1e-2);
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainRow {
    pub g: f64,
    pub intensity: f64,
    /// From the coherent-mode spectrum.
    pub k: f64,
    /// From the correlation integral.
    pub k_g1: f64,
}

pub fn run(setup: &HighGainSetup) -> Result<(HighGainG1, SchmidtResult)> {
    let cal = setup.calibration()?;
    let hg = build_g1(&setup.grid, &setup.pump, &setup.crystal, &cal, &setup.quadrature)?;
    let modes = coherent_modes(&hg.g1, &setup.truncation)?;
    Ok((hg, modes))
}

pub fn gain_sweep(setup: &HighGainSetup, g_values: &[f64]) -> Result<Vec<GainRow>> {
    g_values
        .iter()
        .map(|&g| {
            let mut s = setup.clone();
            s.pump.g = g;
            let (hg, modes) = run(&s)?;
            Ok(GainRow { g, intensity: hg.intensity, k: modes.k, k_g1: schmidt_number_g1(&hg.g1)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pump(g: f64) -> PumpHighGain {
        PumpHighGain { g, w_p: 10e-6, delta_t: 1e-13, lambda_p0: 355e-9 }
    }

    #[test]
    fn calibration_sets_gain_length() {
        let cr = CrystalConfig::bbo(32.914, 2e-3);
        let p = pump(3.7);
        let cal = GainCalibration::shipped(&cr, p.lambda_p0).unwrap();
        let k0 = cr.daughter_k(p.omega_p0() / 2.0).unwrap();
        let gam = gamma(0.0, k0 * k0, 0.0, 0.0, &p, &cal);
        assert!((gam.re * cr.length - 3.7).abs() < 1e-12 && gam.im == 0.0);
    }

    #[test]
    fn zero_bracket_gives_crystal_length() {
        let gam = C64::new(0.0, 0.0);
        assert_eq!(sinhc(gam, 2e-3), 2e-3);
    }

    #[test]
    fn vanishing_pump_recovers_sinc() {
        let cal = GainCalibration { c2_eff: 1.0 };
        let p = pump(1.0);
        let length = 2e-3;
        for &delta in &[-3e3, -250.0, 17.0, 900.0, 4e4] {
            // Far outside the beam the pump intensity underflows to zero.
            let gam = gamma(delta, 1.0, 1.0, 0.0, &p, &cal);
            assert!((gam - C64::new(0.0, delta.abs() / 2.0)).norm() < 1e-12 * delta.abs());
            let expect = length * crate::biphoton::sinc(delta * length / 2.0);
            assert!((sinhc(gam, length) - expect).abs() < 1e-12 * length);
        }
    }

    #[test]
    fn series_meets_direct_formula() {
        let length = 1.0;
        for arg in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let z = C64::from_polar(1e-4, arg);
            let (s, d) = (sinhc_series(z, length), sinhc_direct(z, length));
            assert!((s - d).abs() < 1e-12 * d.abs().max(1e-300), "{arg}: {s} {d}");
        }
    }

    fn tiny_grid() -> GridSpec {
        GridSpec::new(3, 3, 6, 2e5, omega_from_wavelength(355e-9) / 2.0, 1e14).unwrap()
    }

    #[test]
    fn built_correlation_is_exactly_hermitian() {
        let cr = CrystalConfig::bbo(32.914, 2e-3);
        let p = pump(2.0);
        let cal = GainCalibration::shipped(&cr, p.lambda_p0).unwrap();
        let quad = QuadratureSpec { rho_order: 48, t_order: 128, tol: 1e-6 };
        let hg = build_g1(&tiny_grid(), &p, &cr, &cal, &quad).unwrap();
        assert_eq!(hg.g1.hermitian_defect(), 0.0);
        assert!((hg.g1.trace() - 1.0).abs() < 1e-12);
        for d in hg.g1.diagonal() {
            assert!(d > 0.0);
        }
    }

    #[test]
    fn under_resolved_quadrature_is_reported() {
        let cr = CrystalConfig::bbo(32.914, 2e-3);
        let p = pump(2.0);
        let cal = GainCalibration::shipped(&cr, p.lambda_p0).unwrap();
        let quad = QuadratureSpec { rho_order: 3, t_order: 3, tol: 1e-6 };
        assert!(matches!(build_g1(&tiny_grid(), &p, &cr, &cal, &quad), Err(Error::Numerical(_))));
    }

    #[test]
    fn rank_one_correlation_is_single_mode() {
        let g = tiny_grid();
        let (p, m) = (g.dim(), g.n_phi);
        let u: Vec<C64> = (0..p).map(|mu| C64::from_polar((-(mu as f64) / 3.0).exp(), 0.2 * mu as f64)).collect();
        let mut v = vec![C64::new(0.0, 0.0); p * p * m];
        for a in 0..p {
            for b in 0..p {
                for k in 0..m {
                    v[(a * p + b) * m + k] = u[a] * u[b].conj();
                }
            }
        }
        let t = CorrelationTensor::from_values(g, v).unwrap().normalized().unwrap();
        let r = coherent_modes(&t, &Truncation { l_max: 2, m_max: 10, tol: 1e-6 }).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.k - 1.0).abs() < 1e-12);
        assert!((schmidt_number_g1(&t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn harmonics_are_hermitian() {
        let cr = CrystalConfig::bbo(32.914, 2e-3);
        let p = pump(4.0);
        let cal = GainCalibration::shipped(&cr, p.lambda_p0).unwrap();
        let quad = QuadratureSpec { rho_order: 48, t_order: 128, tol: 1e-6 };
        let hg = build_g1(&tiny_grid(), &p, &cr, &cal, &quad).unwrap();
        for f in hg.g1.weighted_harmonic(&[0, 1, 2]) {
            let peak = f.norm_max();
            for i in 0..f.nrows() {
                for j in 0..f.ncols() {
                    assert!((f[(i, j)] - f[(j, i)].conj()).norm() < 1e-12 * peak);
                }
            }
        }
    }
}
