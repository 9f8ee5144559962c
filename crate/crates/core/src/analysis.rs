//! Per-mode diagnostics and parameter sweeps of the Schmidt number.

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biphoton::{boundary_ratio, marginal_intensity, LowGainSetup};
use crate::correlation::{schmidt_number_g1, schmidt_number_reduced};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::highgain::{self, HighGainSetup};
use crate::linalg::singular_values;
use crate::schmidt::decompose;

/// Slack absorbed by the trend classification, relative per step.
pub const TREND_SLACK: f64 = 0.005;

fn mode_matrix(mode: &[C64], grid: &GridSpec) -> Result<Mat<C64>> {
    if mode.len() != grid.dim() {
        return Err(Error::Config(format!("mode has {} samples, grid has {}", mode.len(), grid.dim())));
    }
    let (dq, dw) = (grid.dq(), grid.d_omega());
    Ok(Mat::from_fn(grid.n_q, grid.n_omega, |iq, iw| mode[grid.index(iq, iw)] * (grid.q(iq) * dq * dw).sqrt()))
}

/// Space-time coupling of a mode, `(sum s)^2 / sum s^2` over the squared
/// singular values of its measure-weighted `(q, omega)` matrix.
pub fn nonseparability(mode: &[C64], grid: &GridSpec) -> Result<f64> {
    let b = mode_matrix(mode, grid)?;
    let s = singular_values(&b)?;
    let sigma: Vec<f64> = s.iter().map(|x| x * x).collect();
    let (s1, s2): (f64, f64) = (sigma.iter().sum(), sigma.iter().map(|x| x * x).sum());
    if !(s2 > 0.0) {
        return Err(Error::Numerical("zero mode has no separability measure".into()));
    }
    Ok(s1 * s1 / s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Q,
    Omega,
}

/// Root of the measure-weighted central second moment of `|u|^2` along one axis.
pub fn mode_width(mode: &[C64], grid: &GridSpec, axis: Axis) -> Result<f64> {
    if mode.len() != grid.dim() {
        return Err(Error::Config(format!("mode has {} samples, grid has {}", mode.len(), grid.dim())));
    }
    let w = grid.weights();
    let coord = |mu: usize| match axis {
        Axis::Q => grid.q_of(mu),
        Axis::Omega => grid.omega_of(mu),
    };
    let dens: Vec<f64> = mode.iter().zip(&w).map(|(u, w)| u.norm_sqr() * w).collect();
    let total: f64 = dens.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("zero mode has no width".into()));
    }
    let mean = dens.iter().enumerate().map(|(mu, d)| d * coord(mu)).sum::<f64>() / total;
    let var = dens.iter().enumerate().map(|(mu, d)| d * (coord(mu) - mean).powi(2)).sum::<f64>() / total;
    Ok(var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "w_p")]
    WaistP,
    #[serde(rename = "L")]
    Length,
    #[serde(rename = "delta_lambda_p")]
    DeltaLambdaP,
    /// Values in degrees.
    #[serde(rename = "theta_p")]
    ThetaP,
    #[serde(rename = "g")]
    Gain,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::WaistP => "w_p",
            SweepAxis::Length => "L",
            SweepAxis::DeltaLambdaP => "delta_lambda_p",
            SweepAxis::ThetaP => "theta_p",
            SweepAxis::Gain => "g",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KMethod {
    /// Correlation integral, no mode extraction.
    #[default]
    Correlation,
    /// Full decomposition.
    Spectrum,
}

#[derive(Debug, Clone)]
pub enum Scenario {
    LowGain(LowGainSetup),
    HighGain(HighGainSetup),
}

impl Scenario {
    pub fn with(&self, axis: SweepAxis, value: f64) -> Result<Scenario> {
        let mut s = self.clone();
        let bad = |what: &str| Err(Error::Config(format!("sweep axis {} does not apply to the {what} regime", axis.name())));
        match (&mut s, axis) {
            (Scenario::LowGain(c), SweepAxis::WaistP) => c.pump.w_p = value,
            (Scenario::HighGain(c), SweepAxis::WaistP) => c.pump.w_p = value,
            (Scenario::LowGain(c), SweepAxis::Length) => c.crystal.length = value,
            (Scenario::HighGain(c), SweepAxis::Length) => c.crystal.length = value,
            (Scenario::LowGain(c), SweepAxis::ThetaP) => c.crystal.theta_p = value.to_radians(),
            (Scenario::HighGain(c), SweepAxis::ThetaP) => c.crystal.theta_p = value.to_radians(),
            (Scenario::LowGain(c), SweepAxis::DeltaLambdaP) => c.pump.delta_lambda_p = value,
            (Scenario::HighGain(c), SweepAxis::Gain) => c.pump.g = value,
            (Scenario::LowGain(_), SweepAxis::Gain) => return bad("low-gain"),
            (Scenario::HighGain(_), SweepAxis::DeltaLambdaP) => return bad("high-gain"),
        }
        Ok(s)
    }

    /// Schmidt number plus a regime-specific side value: the window
    /// boundary ratio at low gain, the integrated intensity at high gain.
    pub fn evaluate(&self, method: KMethod) -> Result<(f64, f64)> {
        match self {
            Scenario::LowGain(c) => {
                let psi = c.build()?;
                let edge = boundary_ratio(&marginal_intensity(&psi), &c.grid);
                let k = match method {
                    KMethod::Correlation => schmidt_number_reduced(&psi)?,
                    KMethod::Spectrum => decompose(&psi, &c.truncation)?.result.k,
                };
                Ok((k, edge))
            }
            Scenario::HighGain(c) => {
                let (hg, modes) = highgain::run(c)?;
                let k = match method {
                    KMethod::Correlation => schmidt_number_g1(&hg.g1)?,
                    KMethod::Spectrum => modes.k,
                };
                Ok((k, hg.intensity))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Increasing,
    Decreasing,
    NonMonotone,
}

/// Monotone if no step moves against the trend by more than `slack`
/// (relative) and the end point strictly beats the start.
pub fn trend(ks: &[f64], slack: f64) -> Trend {
    if ks.len() < 2 {
        return Trend::NonMonotone;
    }
    let up = ks.windows(2).all(|w| w[1] >= w[0] * (1.0 - slack)) && ks[ks.len() - 1] > ks[0];
    let down = ks.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack)) && ks[ks.len() - 1] < ks[0];
    match (up, down) {
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        _ => Trend::NonMonotone,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub k: f64,
    pub side: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub method: KMethod,
    pub rows: Vec<SweepRow>,
    pub trend: Trend,
}

pub fn sweep(base: &Scenario, axis: SweepAxis, values: &[f64], method: KMethod) -> Result<SweepTable> {
    let rows: Vec<Result<SweepRow>> = values
        .par_iter()
        .map(|&v| {
            let (k, side) = base.with(axis, v)?.evaluate(method)?;
            Ok(SweepRow { value: v, k, side })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
    Ok(SweepTable { axis, method, trend: trend(&ks, TREND_SLACK), rows })
}

/// Same physics on a window twice as large in `q` and `omega`, at the same
/// sampling density (azimuthal sampling doubled with the radial extent).
pub fn doubled_window(grid: &GridSpec) -> GridSpec {
    GridSpec {
        n_q: 2 * grid.n_q,
        n_omega: 2 * grid.n_omega,
        n_phi: 2 * grid.n_phi,
        q_max: 2.0 * grid.q_max,
        omega_center: grid.omega_center,
        omega_half_width: 2.0 * grid.omega_half_width,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowRow {
    pub theta_deg: f64,
    pub k_small: f64,
    pub k_large: f64,
    pub edge_small: f64,
    pub edge_large: f64,
}

/// Angle sweep evaluated on the base window and on its doubled copy.
pub fn window_comparison(base: &LowGainSetup, thetas_deg: &[f64], method: KMethod) -> Result<Vec<WindowRow>> {
    let small = Scenario::LowGain(base.clone());
    let mut large_setup = base.clone();
    large_setup.grid = doubled_window(&base.grid);
    let large = Scenario::LowGain(large_setup);
    let a = sweep(&small, SweepAxis::ThetaP, thetas_deg, method)?;
    let b = sweep(&large, SweepAxis::ThetaP, thetas_deg, method)?;
    Ok(a.rows
        .iter()
        .zip(&b.rows)
        .map(|(x, y)| WindowRow { theta_deg: x.value, k_small: x.k, k_large: y.k, edge_small: x.side, edge_large: y.side })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(40, 64, 1, 4e5, 2.6e15, 8e13).unwrap()
    }

    fn sep(grid: &GridSpec, sq: f64, sw: f64) -> Vec<C64> {
        (0..grid.dim())
            .map(|mu| {
                let (q, w) = (grid.q_of(mu), grid.omega_of(mu) - grid.omega_center);
                C64::new((-(q / sq).powi(2) - (w / sw).powi(2)).exp(), 0.0)
            })
            .collect()
    }

    #[test]
    fn separable_mode_has_unit_c() {
        let g = grid();
        let c = nonseparability(&sep(&g, 1e5, 2e13), &g).unwrap();
        assert!((c - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_equal_orthogonal_terms_give_two() {
        // s1 t1 + s2 t2 with disjoint supports in both q and omega.
        let g = GridSpec::new(4, 4, 1, 4e5, 2.6e15, 8e13).unwrap();
        let mut u = vec![C64::new(0.0, 0.0); g.dim()];
        let (dq, dw) = (g.dq(), g.d_omega());
        u[g.index(0, 0)] = C64::new(1.0 / (g.q(0) * dq * dw).sqrt(), 0.0);
        u[g.index(2, 3)] = C64::new(0.0, 1.0 / (g.q(2) * dq * dw).sqrt());
        assert!((nonseparability(&u, &g).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_mode_is_rejected() {
        let g = grid();
        assert!(nonseparability(&vec![C64::new(0.0, 0.0); g.dim()], &g).is_err());
    }

    #[test]
    fn gaussian_frequency_width() {
        let g = GridSpec::new(4, 400, 1, 4e5, 2.6e15, 2e14).unwrap();
        let sigma = 1.7e13;
        let u: Vec<C64> = (0..g.dim())
            .map(|mu| C64::new((-(g.omega_of(mu) - g.omega_center).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0))
            .collect();
        let w = mode_width(&u, &g, Axis::Omega).unwrap();
        assert!((w - sigma).abs() < 1e-6 * sigma);
    }

    #[test]
    fn width_scales_with_axis() {
        let g = grid();
        let g2 = GridSpec { q_max: 2.0 * g.q_max, ..g.clone() };
        let u1 = sep(&g, 1e5, 2e13);
        let u2 = sep(&g2, 2e5, 2e13);
        let (a, b) = (mode_width(&u1, &g, Axis::Q).unwrap(), mode_width(&u2, &g2, Axis::Q).unwrap());
        assert!((b / a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trend_with_slack() {
        assert_eq!(trend(&[1.0, 2.0, 3.0], TREND_SLACK), Trend::Increasing);
        assert_eq!(trend(&[1.0, 2.0, 1.996, 3.0], TREND_SLACK), Trend::Increasing);
        assert_eq!(trend(&[1.0, 2.0, 1.9, 3.0], TREND_SLACK), Trend::NonMonotone);
        assert_eq!(trend(&[3.0, 2.0, 1.0], TREND_SLACK), Trend::Decreasing);
        assert_eq!(trend(&[1.0, 1.0], TREND_SLACK), Trend::NonMonotone);
    }
}
