//! BBO indices and the longitudinal mismatch across the signal window.

use stschmidt::dispersion::{
    central_delta_kz, effective_pump_index, extraordinary_index, omega_from_wavelength, ordinary_index, CrystalConfig,
};

fn main() -> stschmidt::Result<()> {
    let crystal = CrystalConfig::bbo(32.914, 2e-3);
    let set = &crystal.sellmeier;
    for lam in [0.355, 0.532, 0.710, 1.064] {
        println!(
            "{lam:.3} um   n_o {:.6}  n_e {:.6}  eta_p {:.6}",
            ordinary_index(lam, set)?,
            extraordinary_index(lam, set)?,
            effective_pump_index(crystal.theta_p, lam, set)?
        );
    }

    let lp = 355e-9;
    let w0 = omega_from_wavelength(lp) / 2.0;
    println!("\n  q [1/m]    dk L/2 at degeneracy");
    for i in 0..=8 {
        let q = i as f64 * 5e4;
        println!("{q:9.2e}  {:>10.4}", central_delta_kz(q, w0, &crystal, lp)? * crystal.length / 2.0);
    }
    Ok(())
}
