//! The reduced low-gain two-photon amplitude on a (q_s, w_s, q_i, w_i, dphi)
//! grid. Layout is `[mu_s][mu_i][k]` with the azimuthal index fastest.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dispersion::{kz, omega_from_wavelength, CrystalConfig};
use crate::error::{Error, Leg, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpLowGain {
    pub lambda_p0: f64,
    pub w_p: f64,
    pub delta_lambda_p: f64,
}

impl PumpLowGain {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda_p0", self.lambda_p0), ("w_p", self.w_p), ("delta_lambda_p", self.delta_lambda_p)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("pump {name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    pub fn omega_p0(&self) -> f64 {
        omega_from_wavelength(self.lambda_p0)
    }

    pub fn delta_omega_p(&self) -> f64 {
        self.delta_lambda_p * self.omega_p0() / self.lambda_p0
    }
}

/// Gaussian pump envelope; real, unit peak at `(0, omega_p0)`.
pub fn pump_amplitude(q_p: f64, omega_p: f64, pump: &PumpLowGain) -> f64 {
    let dw = (omega_p - pump.omega_p0()) / pump.delta_omega_p();
    (-q_p * q_p * pump.w_p * pump.w_p / 4.0 - dw * dw).exp()
}

pub fn pump_q_magnitude(q_s: f64, q_i: f64, delta_phi: f64) -> f64 {
    pump_q_squared(q_s, q_i, delta_phi.cos()).sqrt()
}

// Symmetric in (q_s, q_i) bit for bit.
#[inline]
fn pump_q_squared(q_s: f64, q_i: f64, cos_dphi: f64) -> f64 {
    ((q_s * q_s + q_i * q_i) + 2.0 * (q_s * q_i) * cos_dphi).max(0.0)
}

#[inline]
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone)]
pub struct BiphotonTensor {
    values: Vec<C64>,
    grid: GridSpec,
    norm: f64,
}

impl BiphotonTensor {
    /// Wraps raw samples and normalizes them under the full polar measure.
    pub fn from_values(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        let p = grid.dim();
        if values.len() != p * p * grid.n_phi {
            return Err(Error::Config(format!(
                "tensor has {} samples, grid needs {}",
                values.len(),
                p * p * grid.n_phi
            )));
        }
        let mut t = BiphotonTensor { values, grid, norm: 0.0 };
        t.norm = t.normalize(1.0)?;
        Ok(t)
    }

    /// Samples `f(q_s, w_s, q_i, w_i, dphi)` on the grid and normalizes.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64, f64, f64, f64) -> C64 + Sync,
    {
        let (p, m) = (grid.dim(), grid.n_phi);
        let mut values = vec![C64::new(0.0, 0.0); p * p * m];
        values.par_chunks_mut(p * m).enumerate().for_each(|(ms, row)| {
            let (qs, ws) = (grid.q_of(ms), grid.omega_of(ms));
            for mi in 0..p {
                let (qi, wi) = (grid.q_of(mi), grid.omega_of(mi));
                for k in 0..m {
                    row[mi * m + k] = f(qs, ws, qi, wi, grid.phi(k));
                }
            }
        });
        Self::from_values(grid, values)
    }

    fn normalize(&mut self, measure_scale: f64) -> Result<f64> {
        let n = measure_norm_sq(&self.values, &self.grid) * measure_scale;
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Numerical(format!("wavefunction norm {n} is not positive and finite")));
        }
        let s = 1.0 / n.sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(n)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Squared norm before normalization.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn get(&self, mu_s: usize, mu_i: usize, k: usize) -> C64 {
        let (p, m) = (self.grid.dim(), self.grid.n_phi);
        self.values[(mu_s * p + mu_i) * m + k]
    }

    /// The azimuthal line at fixed `(mu_s, mu_i)`.
    pub fn line(&self, mu_s: usize, mu_i: usize) -> &[C64] {
        let (p, m) = (self.grid.dim(), self.grid.n_phi);
        let start = (mu_s * p + mu_i) * m;
        &self.values[start..start + m]
    }

    /// Returns a copy multiplied by `c` without renormalizing.
    pub fn scaled(&self, c: C64) -> Self {
        BiphotonTensor {
            values: self.values.iter().map(|v| v * c).collect(),
            grid: self.grid.clone(),
            norm: self.norm * c.norm_sqr(),
        }
    }

    /// Largest deviation from evenness in the azimuthal difference.
    pub fn evenness_defect(&self) -> f64 {
        let m = self.grid.n_phi;
        let mut worst = 0.0f64;
        for line in self.values.chunks(m) {
            for k in 1..m {
                worst = worst.max((line[k] - line[m - k]).norm());
            }
        }
        worst
    }

    /// Largest deviation from signal/idler exchange symmetry.
    pub fn exchange_defect(&self) -> f64 {
        let p = self.grid.dim();
        let mut worst = 0.0f64;
        for ms in 0..p {
            for mi in ms + 1..p {
                for (a, b) in self.line(ms, mi).iter().zip(self.line(mi, ms)) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
        worst
    }
}

/// `2 pi sum w_s w_i (2 pi / M) |psi|^2`.
pub(crate) fn measure_norm_sq(values: &[C64], grid: &GridSpec) -> f64 {
    let (p, m) = (grid.dim(), grid.n_phi);
    let w = grid.weights();
    let mut total = 0.0;
    for ms in 0..p {
        for mi in 0..p {
            let start = (ms * p + mi) * m;
            let s: f64 = values[start..start + m].iter().map(|v| v.norm_sqr()).sum();
            total += w[ms] * w[mi] * s;
        }
    }
    2.0 * PI * grid.phi_weight() * total
}

/// Builds the normalized amplitude for a rotationally symmetric pump
/// spectrum `amp(|q_p|, omega_p)`.
pub fn build_with_amplitude<A>(grid: &GridSpec, crystal: &CrystalConfig, lambda_p0: f64, amp: A) -> Result<BiphotonTensor>
where
    A: Fn(f64, f64) -> f64 + Sync,
{
    grid.validate()?;
    crystal.validate()?;
    let (p, m) = (grid.dim(), grid.n_phi);

    let mut kzd = Vec::with_capacity(p);
    for mu in 0..p {
        let k = crystal.daughter_k(grid.omega_of(mu))?;
        kzd.push(kz(k, grid.q_of(mu), Leg::Signal)?);
    }
    let eta_over_c = crystal.pump_k(1.0, lambda_p0)?;
    // Worst case for the pump square root: widest q_p at the lowest pump frequency.
    let kp_min = eta_over_c * 2.0 * grid.omega(0);
    kz(kp_min, 2.0 * grid.q(grid.n_q - 1), Leg::Pump)?;

    let cos = grid.cos_table();
    let half_l = crystal.length / 2.0;
    let mut values = vec![C64::new(0.0, 0.0); p * p * m];
    values.par_chunks_mut(p * m).enumerate().for_each(|(ms, row)| {
        let (qs, ws) = (grid.q_of(ms), grid.omega_of(ms));
        for mi in 0..p {
            let (qi, wi) = (grid.q_of(mi), grid.omega_of(mi));
            let wp = ws + wi;
            let kp = eta_over_c * wp;
            let kzsum = kzd[ms] + kzd[mi];
            for k in 0..m {
                let qp2 = pump_q_squared(qs, qi, cos[k]);
                let dk = (kp * kp - qp2).sqrt() - kzsum;
                let x = dk * half_l;
                let a = amp(qp2.sqrt(), wp) * sinc(x);
                row[mi * m + k] = C64::from_polar(a, x);
            }
        }
    });
    BiphotonTensor::from_values(grid.clone(), values)
}

pub fn build_wavefunction(grid: &GridSpec, pump: &PumpLowGain, crystal: &CrystalConfig) -> Result<BiphotonTensor> {
    pump.validate()?;
    build_with_amplitude(grid, crystal, pump.lambda_p0, |qp, wp| pump_amplitude(qp, wp, pump))
}

/// `I(mu) = sum_nu w_nu (2 pi / M) sum_k |psi(mu, nu, k)|^2`; integrates to
/// one under `2 pi q dq domega`.
pub fn marginal_intensity(psi: &BiphotonTensor) -> Vec<f64> {
    let grid = psi.grid();
    let p = grid.dim();
    let w = grid.weights();
    let dphi = grid.phi_weight();
    (0..p)
        .map(|ms| {
            let mut acc = 0.0;
            for mi in 0..p {
                acc += w[mi] * psi.line(ms, mi).iter().map(|v| v.norm_sqr()).sum::<f64>();
            }
            acc * dphi
        })
        .collect()
}

/// Largest marginal intensity on the window edge (outermost q ring or either
/// frequency edge) relative to the global peak.
pub fn boundary_ratio(intensity: &[f64], grid: &GridSpec) -> f64 {
    let peak = intensity.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let mut edge = 0.0f64;
    for mu in 0..grid.dim() {
        let (iq, iw) = grid.unflatten(mu);
        let on_edge = iq + 1 == grid.n_q || (grid.n_omega > 1 && (iw == 0 || iw + 1 == grid.n_omega));
        if on_edge {
            edge = edge.max(intensity[mu]);
        }
    }
    edge / peak
}

/// Everything needed for one low-gain decomposition.
#[derive(Debug, Clone)]
pub struct LowGainSetup {
    pub grid: GridSpec,
    pub pump: PumpLowGain,
    pub crystal: CrystalConfig,
    pub truncation: crate::schmidt::Truncation,
}

impl LowGainSetup {
    pub fn build(&self) -> Result<BiphotonTensor> {
        build_wavefunction(&self.grid, &self.pump, &self.crystal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> (GridSpec, PumpLowGain, CrystalConfig) {
        let pump = PumpLowGain { lambda_p0: 355e-9, w_p: 8e-6, delta_lambda_p: 5e-9 };
        let grid = GridSpec::new(6, 6, 8, 2e5, pump.omega_p0() / 2.0, 2.5e14).unwrap();
        (grid, pump, CrystalConfig::bbo(32.914, 2e-3))
    }

    #[test]
    fn pump_amplitude_landmarks() {
        let (_, pump, _) = desk();
        let w0 = pump.omega_p0();
        assert_eq!(pump_amplitude(0.0, w0, &pump), 1.0);
        assert!((pump_amplitude(2.0 / pump.w_p, w0, &pump) - (-1.0f64).exp()).abs() < 1e-15);
        let dw = pump.delta_omega_p();
        assert!((pump_amplitude(0.0, w0 + dw, &pump) - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn law_of_cosines() {
        assert!(pump_q_magnitude(1.5, 1.5, PI).abs() < 1e-7);
        assert!((pump_q_magnitude(1.5, 1.5, 0.0) - 3.0).abs() < 1e-15);
        assert!((pump_q_magnitude(3.0, 4.0, PI / 2.0) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn sinc_at_zero() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(PI)).abs() < 1e-16);
    }

    #[test]
    fn built_tensor_symmetries_are_exact() {
        let (g, p, c) = desk();
        let psi = build_wavefunction(&g, &p, &c).unwrap();
        assert_eq!(psi.evenness_defect(), 0.0);
        assert_eq!(psi.exchange_defect(), 0.0);
        assert!((measure_norm_sq(psi.values(), &g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_integrates_to_one() {
        let (g, p, c) = desk();
        let psi = build_wavefunction(&g, &p, &c).unwrap();
        let i = marginal_intensity(&psi);
        let total: f64 = 2.0 * PI * i.iter().zip(g.weights()).map(|(a, w)| a * w).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(i.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn separable_marginal_follows_factor() {
        let (g, _, _) = desk();
        let f = |q: f64, w: f64| (-(q / 1e5).powi(2) - ((w - g.omega_center) / 1e14).powi(2)).exp();
        let psi = BiphotonTensor::from_fn(g.clone(), |qs, ws, qi, wi, _| C64::new(f(qs, ws) * f(qi, wi), 0.0)).unwrap();
        let i = marginal_intensity(&psi);
        let ratio0 = i[0] / f(g.q_of(0), g.omega_of(0)).powi(2);
        for mu in 0..g.dim() {
            let r = i[mu] / f(g.q_of(mu), g.omega_of(mu)).powi(2);
            assert!((r - ratio0).abs() < 1e-10 * ratio0);
        }
    }

    #[test]
    fn doubled_measure_halves_density() {
        let (g, p, c) = desk();
        let psi = build_wavefunction(&g, &p, &c).unwrap();
        let mut doubled = psi.clone();
        doubled.normalize(2.0).unwrap();
        for (a, b) in psi.values().iter().zip(doubled.values()) {
            assert!((b.norm_sqr() - a.norm_sqr() / 2.0).abs() <= 1e-12 * a.norm_sqr().max(1e-300));
        }
    }

    #[test]
    fn oversized_window_is_evanescent() {
        let (_, p, c) = desk();
        let g = GridSpec::new(4, 4, 8, 1e8, p.omega_p0() / 2.0, 2.5e14).unwrap();
        assert!(matches!(build_wavefunction(&g, &p, &c), Err(Error::Evanescent { .. })));
    }

    #[test]
    fn phase_matched_point_has_unit_sinc() {
        // A crystal of vanishing length phase-matches everywhere.
        let (g, p, mut c) = desk();
        c.length = 1e-300;
        let psi = build_wavefunction(&g, &p, &c).unwrap();
        let raw = psi.get(0, 0, 0) * psi.norm().sqrt();
        let qp = 2.0 * g.q(0);
        let expected = pump_amplitude(qp, 2.0 * g.omega(0), &p);
        assert!((raw.re - expected).abs() < 1e-12 && raw.im.abs() < 1e-12);
    }
}
