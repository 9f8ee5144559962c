//! Uniaxial crystal optics: Sellmeier indices, the effective extraordinary
//! pump index and longitudinal phase mismatch for type-I (e -> o + o) SPDC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Leg, Result};

/// Speed of light in vacuum, m/s (SI defined).
pub const C: f64 = 299_792_458.0;

/// Angular frequency for a vacuum wavelength in metres.
pub fn omega_from_wavelength(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / lambda
}

/// Vacuum wavelength in micrometres for an angular frequency.
pub fn wavelength_um(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / omega * 1e6
}

/// `n^2 = a + b / (lambda^2 - c) - d lambda^2`, lambda in micrometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierTerms {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SellmeierTerms {
    fn index(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        (self.a + self.b / (l2 - self.c) - self.d * l2).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierSet {
    pub name: String,
    pub ordinary: SellmeierTerms,
    pub extraordinary: SellmeierTerms,
    /// Validity band in micrometres.
    pub band_um: [f64; 2],
}

impl SellmeierSet {
    /// beta-BaB2O4, Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
    pub fn bbo() -> Self {
        SellmeierSet {
            name: "bbo-eimerl-1987".into(),
            ordinary: SellmeierTerms { a: 2.7405, b: 0.0184, c: 0.0179, d: 0.0155 },
            extraordinary: SellmeierTerms { a: 2.3730, b: 0.0128, c: 0.0156, d: 0.0044 },
            band_um: [0.22, 1.2],
        }
    }

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "bbo" | "bbo-eimerl-1987" => Ok(Self::bbo()),
            other => Err(Error::Config(format!("unknown Sellmeier set '{other}'"))),
        }
    }

    fn check(&self, lambda_um: f64) -> Result<()> {
        let [lo, hi] = self.band_um;
        if !(lambda_um >= lo && lambda_um <= hi) {
            return Err(Error::Domain(format!(
                "wavelength {lambda_um:.6} um outside Sellmeier band [{lo}, {hi}] of '{}'",
                self.name
            )));
        }
        Ok(())
    }
}

pub fn ordinary_index(lambda_um: f64, set: &SellmeierSet) -> Result<f64> {
    set.check(lambda_um)?;
    Ok(set.ordinary.index(lambda_um))
}

pub fn extraordinary_index(lambda_um: f64, set: &SellmeierSet) -> Result<f64> {
    set.check(lambda_um)?;
    Ok(set.extraordinary.index(lambda_um))
}

/// Index seen by an extraordinary wave at angle `theta_p` to the optic axis.
pub fn effective_pump_index(theta_p: f64, lambda_um: f64, set: &SellmeierSet) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta_p) {
        return Err(Error::Domain(format!("theta_p = {theta_p} rad outside [0, pi/2]")));
    }
    let no = ordinary_index(lambda_um, set)?;
    let ne = extraordinary_index(lambda_um, set)?;
    let (s, c) = theta_p.sin_cos();
    Ok(ne * no / (no * no * s * s + ne * ne * c * c).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalConfig {
    pub theta_p: f64,
    pub length: f64,
    pub sellmeier: SellmeierSet,
}

impl CrystalConfig {
    pub fn bbo(theta_p_deg: f64, length: f64) -> Self {
        CrystalConfig { theta_p: theta_p_deg.to_radians(), length, sellmeier: SellmeierSet::bbo() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_p > 0.0 && self.theta_p < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config(format!("theta_p = {} rad must lie in (0, pi/2)", self.theta_p)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!("crystal length {} must be positive", self.length)));
        }
        Ok(())
    }

    /// Pump wavenumber. The extraordinary index is frozen at the central
    /// pump wavelength; only the frequency varies across the pump spectrum.
    pub fn pump_k(&self, omega_p: f64, lambda_p0: f64) -> Result<f64> {
        let eta = effective_pump_index(self.theta_p, lambda_p0 * 1e6, &self.sellmeier)?;
        Ok(eta * omega_p / C)
    }

    /// Ordinary-wave wavenumber for signal or idler.
    pub fn daughter_k(&self, omega: f64) -> Result<f64> {
        Ok(ordinary_index(wavelength_um(omega), &self.sellmeier)? * omega / C)
    }
}

/// `sqrt(k^2 - q^2)`, refusing evanescent components.
pub fn kz(k: f64, q: f64, leg: Leg) -> Result<f64> {
    if !(q.abs() < k) {
        return Err(Error::Evanescent { leg, q, k });
    }
    Ok((k * k - q * q).sqrt())
}

pub fn delta_kz(
    q_p: f64,
    q_s: f64,
    q_i: f64,
    omega_s: f64,
    omega_i: f64,
    crystal: &CrystalConfig,
    lambda_p0: f64,
) -> Result<f64> {
    let kp = kz(crystal.pump_k(omega_s + omega_i, lambda_p0)?, q_p, Leg::Pump)?;
    let ks = kz(crystal.daughter_k(omega_s)?, q_s, Leg::Signal)?;
    let ki = kz(crystal.daughter_k(omega_i)?, q_i, Leg::Idler)?;
    Ok(kp - (ks + ki))
}

/// Mismatch with the idler pinned to the conjugate of the signal mode,
/// used by the high-gain kernel.
pub fn central_delta_kz(q_s: f64, omega_s: f64, crystal: &CrystalConfig, lambda_p0: f64) -> Result<f64> {
    let omega_p0 = omega_from_wavelength(lambda_p0);
    let kp = crystal.pump_k(omega_p0, lambda_p0)?;
    let ks = kz(crystal.daughter_k(omega_s)?, q_s, Leg::Signal)?;
    let ki = kz(crystal.daughter_k(omega_p0 - omega_s)?, q_s, Leg::Idler)?;
    Ok(kp - (ks + ki))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bbo_at_355() -> CrystalConfig {
        CrystalConfig::bbo(32.914, 2e-3)
    }

    // Hand evaluation of the o-polynomial, kept separate from SellmeierTerms.
    fn no_by_hand(l: f64) -> f64 {
        (2.7405 + 0.0184 / (l * l - 0.0179) - 0.0155 * l * l).sqrt()
    }

    #[test]
    fn ordinary_index_matches_polynomial() {
        let set = SellmeierSet::bbo();
        let n = ordinary_index(0.710, &set).unwrap();
        assert!((n - no_by_hand(0.710)).abs() < 1e-15);
        assert!((n - 1.66449).abs() < 5e-5);
        assert!(ordinary_index(0.355, &set).unwrap() > n);
    }

    #[test]
    fn identical_axes_give_identical_indices() {
        let mut set = SellmeierSet::bbo();
        set.extraordinary = set.ordinary;
        for i in 0..50 {
            let l = 0.3 + 0.9 * i as f64 / 49.0;
            assert_eq!(ordinary_index(l, &set).unwrap(), extraordinary_index(l, &set).unwrap());
        }
    }

    #[test]
    fn negative_uniaxial_over_band() {
        let set = SellmeierSet::bbo();
        for i in 0..100 {
            let l = (0.3 + 0.9 * i as f64 / 99.0).min(1.2);
            let no = ordinary_index(l, &set).unwrap();
            let ne = extraordinary_index(l, &set).unwrap();
            assert!(ne > 1.0 && no > ne);
        }
    }

    #[test]
    fn out_of_band_is_domain_error() {
        let set = SellmeierSet::bbo();
        assert!(matches!(ordinary_index(2.0, &set), Err(Error::Domain(_))));
        assert!(matches!(ordinary_index(0.1, &set), Err(Error::Domain(_))));
    }

    #[test]
    fn pump_index_endpoints() {
        let set = SellmeierSet::bbo();
        let no = ordinary_index(0.355, &set).unwrap();
        let ne = extraordinary_index(0.355, &set).unwrap();
        assert!((effective_pump_index(0.0, 0.355, &set).unwrap() - no).abs() < 1e-15);
        let half_pi = effective_pump_index(std::f64::consts::FRAC_PI_2, 0.355, &set).unwrap();
        assert!((half_pi - ne).abs() < 1e-15);
        let mid = effective_pump_index(32.914f64.to_radians(), 0.355, &set).unwrap();
        assert!(ne < mid && mid < no);
    }

    #[test]
    fn pump_index_monotone_in_theta() {
        let set = SellmeierSet::bbo();
        let mut prev = f64::INFINITY;
        for i in 0..=200 {
            let th = std::f64::consts::FRAC_PI_2 * i as f64 / 200.0;
            let eta = effective_pump_index(th, 0.355, &set).unwrap();
            assert!(eta <= prev);
            prev = eta;
        }
    }

    #[test]
    fn collinear_degenerate_is_nearly_phase_matched() {
        let cr = bbo_at_355();
        let lp = 355e-9;
        let w = omega_from_wavelength(lp) / 2.0;
        let dk = delta_kz(0.0, 0.0, 0.0, w, w, &cr, lp).unwrap();
        assert!((dk * cr.length / 2.0).abs() < 0.01 * std::f64::consts::PI);
        let central = central_delta_kz(0.0, w, &cr, lp).unwrap();
        assert!((central - dk).abs() <= 1e-12 * cr.pump_k(2.0 * w, lp).unwrap());
    }

    #[test]
    fn on_axis_collapses_to_wavenumbers() {
        let cr = bbo_at_355();
        let lp = 355e-9;
        let (ws, wi) = (2.5e15, 2.8e15);
        let dk = delta_kz(0.0, 0.0, 0.0, ws, wi, &cr, lp).unwrap();
        let direct = cr.pump_k(ws + wi, lp).unwrap() - cr.daughter_k(ws).unwrap() - cr.daughter_k(wi).unwrap();
        assert!((dk - direct).abs() < 1e-9 * direct.abs().max(1.0) + 1e-6);
    }

    #[test]
    fn central_mismatch_rises_with_q() {
        let cr = bbo_at_355();
        let lp = 355e-9;
        let w = omega_from_wavelength(lp) / 2.0;
        let mut prev = central_delta_kz(0.0, w, &cr, lp).unwrap();
        for i in 1..100 {
            let d = central_delta_kz(i as f64 * 5e3, w, &cr, lp).unwrap();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn central_mismatch_symmetric_at_degeneracy() {
        let cr = bbo_at_355();
        let lp = 355e-9;
        let w0 = omega_from_wavelength(lp);
        let a = central_delta_kz(1e5, w0 / 2.0, &cr, lp).unwrap();
        let b = central_delta_kz(1e5, w0 - w0 / 2.0, &cr, lp).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evanescent_names_leg() {
        let cr = bbo_at_355();
        let lp = 355e-9;
        let w = omega_from_wavelength(lp) / 2.0;
        match delta_kz(0.0, 1e8, 0.0, w, w, &cr, lp) {
            Err(Error::Evanescent { leg: Leg::Signal, .. }) => {}
            other => panic!("{other:?}"),
        }
        match delta_kz(1e8, 0.0, 0.0, w, w, &cr, lp) {
            Err(Error::Evanescent { leg: Leg::Pump, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
