//! Desk-scale configurations. Grids are small enough for a laptop while
//! the physics keeps the structure the checks look for.

use crate::biphoton::{LowGainSetup, PumpLowGain};
use crate::dispersion::{omega_from_wavelength, CrystalConfig};
use crate::grid::GridSpec;
use crate::highgain::{HighGainSetup, PumpHighGain, QuadratureSpec};
use crate::schmidt::Truncation;

pub const LAMBDA_P0: f64 = 355e-9;
pub const THETA_P_DEG: f64 = 32.914;
pub const LENGTH: f64 = 2e-3;

fn grid(n_q: usize, n_omega: usize, n_phi: usize, q_max: f64, half_width: f64) -> GridSpec {
    GridSpec::new(n_q, n_omega, n_phi, q_max, omega_from_wavelength(LAMBDA_P0) / 2.0, half_width).expect("preset grid")
}

fn low(g: GridSpec, w_p: f64, delta_lambda_p: f64, l_max: usize) -> LowGainSetup {
    LowGainSetup {
        grid: g,
        pump: PumpLowGain { lambda_p0: LAMBDA_P0, w_p, delta_lambda_p },
        crystal: CrystalConfig::bbo(THETA_P_DEG, LENGTH),
        truncation: Truncation { l_max, m_max: 100, tol: 1e-8 },
    }
}

/// 12 x 12 x 16 grid; harmonics above l = 7 carry ~1e-10 of the weight,
/// so the truncated spectrum can be compared with the dense SVD.
pub fn oracle_desk() -> LowGainSetup {
    low(grid(12, 12, 16, 2e5, 2.5e14), 8e-6, 5e-9, 7)
}

/// Oracle physics on an `n x n x n` grid, for timing.
pub fn bench_desk(n: usize) -> LowGainSetup {
    let mut s = oracle_desk();
    s.grid = grid(n, n, n, 2e5, 2.5e14);
    s.truncation.l_max = (n - 1) / 2;
    s
}

/// Narrow-band pump below the group-velocity acceptance, used for the
/// waist, length and bandwidth ramps and for mode inspection.
pub fn trend_desk() -> LowGainSetup {
    low(grid(16, 32, 64, 4e5, 3e13), 20e-6, 0.3e-9, 3)
}

/// Fine radial sampling to resolve the on-axis node of `l != 0` modes.
pub fn mode_desk() -> LowGainSetup {
    low(grid(48, 8, 64, 4e5, 2e14), 20e-6, 2e-9, 2)
}

/// Base window for the angle sweep; [`crate::analysis::doubled_window`]
/// gives its partner.
pub fn window_desk() -> LowGainSetup {
    low(grid(12, 12, 32, 2e5, 2e14), 10e-6, 2e-9, 15)
}

pub fn window_thetas() -> Vec<f64> {
    (0..7).map(|i| 32.914 + (33.1 - 32.914) * i as f64 / 6.0).collect()
}

pub fn highgain_desk(g: f64) -> HighGainSetup {
    HighGainSetup {
        grid: grid(12, 12, 16, 3e5, 2e14),
        pump: PumpHighGain { g, w_p: 10e-6, delta_t: 1e-13, lambda_p0: LAMBDA_P0 },
        crystal: CrystalConfig::bbo(THETA_P_DEG, LENGTH),
        truncation: Truncation { l_max: 7, m_max: 100, tol: 1e-8 },
        // The frequency window spans |w - w'| dt up to ~40, beyond what 64 time nodes resolve.
        quadrature: QuadratureSpec { rho_order: 64, t_order: 128, tol: 1e-6 },
        c2_eff: None,
    }
}

/// Single-frequency pair of configurations for the vanishing-gain limit:
/// the low-gain amplitude and the high-gain correlation on the same grid.
pub fn matched_mono() -> (LowGainSetup, HighGainSetup) {
    let g = grid(48, 1, 128, 4e5, 1e13);
    let lowg = low(g.clone(), 80e-6, 0.5e-9, 63);
    let dw = lowg.pump.delta_omega_p();
    let high = HighGainSetup {
        grid: g,
        pump: PumpHighGain { g: 1e-3, w_p: 80e-6, delta_t: std::f64::consts::SQRT_2 / dw, lambda_p0: LAMBDA_P0 },
        crystal: lowg.crystal.clone(),
        truncation: lowg.truncation,
        quadrature: QuadratureSpec { rho_order: 128, t_order: 32, tol: 1e-6 },
        c2_eff: None,
    };
    (lowg, high)
}

/// Experimental parameters (355 nm, 480 um waist, 2 mm, 0.5 nm) on a
/// coarse grid. The pump's transverse spectrum is far narrower than the
/// radial step here, so spectra are qualitative only.
pub fn experiment_coarse() -> LowGainSetup {
    low(grid(24, 24, 64, 4e5, 3e14), 480e-6, 0.5e-9, 31)
}
