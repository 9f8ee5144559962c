//! Midpoint grids over radial wavevector, frequency and azimuthal difference.
//!
//! Flat index `mu = iq * n_omega + iw`; the pair weight `w_mu = q dq domega`
//! is the polar radial measure times the frequency step.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_q: usize,
    pub n_omega: usize,
    pub n_phi: usize,
    pub q_max: f64,
    pub omega_center: f64,
    pub omega_half_width: f64,
}

impl GridSpec {
    pub fn new(
        n_q: usize,
        n_omega: usize,
        n_phi: usize,
        q_max: f64,
        omega_center: f64,
        omega_half_width: f64,
    ) -> Result<Self> {
        let g = GridSpec { n_q, n_omega, n_phi, q_max, omega_center, omega_half_width };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_q == 0 || self.n_omega == 0 || self.n_phi == 0 {
            return Err(Error::Config("grid sizes must be positive".into()));
        }
        if !(self.q_max > 0.0 && self.q_max.is_finite()) {
            return Err(Error::Config(format!("q_max = {} must be positive", self.q_max)));
        }
        if !(self.omega_half_width > 0.0 && self.omega_half_width < self.omega_center) {
            return Err(Error::Config(format!(
                "frequency half-width {} must lie in (0, {})",
                self.omega_half_width, self.omega_center
            )));
        }
        Ok(())
    }

    /// Number of (q, omega) pairs.
    pub fn dim(&self) -> usize {
        self.n_q * self.n_omega
    }

    pub fn dq(&self) -> f64 {
        self.q_max / self.n_q as f64
    }

    pub fn d_omega(&self) -> f64 {
        2.0 * self.omega_half_width / self.n_omega as f64
    }

    pub fn q(&self, iq: usize) -> f64 {
        (iq as f64 + 0.5) * self.dq()
    }

    pub fn omega(&self, iw: usize) -> f64 {
        self.omega_center - self.omega_half_width + (iw as f64 + 0.5) * self.d_omega()
    }

    pub fn phi(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_phi as f64
    }

    pub fn phi_weight(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    pub fn index(&self, iq: usize, iw: usize) -> usize {
        iq * self.n_omega + iw
    }

    pub fn unflatten(&self, mu: usize) -> (usize, usize) {
        (mu / self.n_omega, mu % self.n_omega)
    }

    pub fn q_of(&self, mu: usize) -> f64 {
        self.q(mu / self.n_omega)
    }

    pub fn omega_of(&self, mu: usize) -> f64 {
        self.omega(mu % self.n_omega)
    }

    pub fn weights(&self) -> Vec<f64> {
        let (dq, dw) = (self.dq(), self.d_omega());
        (0..self.dim()).map(|mu| self.q_of(mu) * dq * dw).collect()
    }

    /// `cos(2 pi k / M)` with `cos[M - k] == cos[k]` bit for bit.
    pub fn cos_table(&self) -> Vec<f64> {
        let m = self.n_phi;
        let mut t = vec![0.0; m];
        for k in 0..=m / 2 {
            let c = self.phi(k).cos();
            t[k] = c;
            t[(m - k) % m] = c;
        }
        t
    }

    /// Largest OAM index resolvable without aliasing onto itself.
    pub fn max_l(&self) -> usize {
        (self.n_phi - 1) / 2
    }

    pub fn check_l_max(&self, l_max: usize) -> Result<()> {
        if 2 * l_max + 1 > self.n_phi {
            return Err(Error::Config(format!(
                "l_max = {l_max} needs at least {} azimuthal samples, grid has {}",
                2 * l_max + 1,
                self.n_phi
            )));
        }
        Ok(())
    }
}
