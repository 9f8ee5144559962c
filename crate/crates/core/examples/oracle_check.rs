//! Reduced spectrum against the dense six-index SVD on a small grid.

use std::time::Instant;

use stschmidt::correlation::{g1_from_psi, schmidt_number_g1};
use stschmidt::oracle::{brute_force_k, brute_force_spectrum_tensor};
use stschmidt::presets::oracle_desk;
use stschmidt::schmidt::decompose;

fn main() -> stschmidt::Result<()> {
    let setup = oracle_desk();
    let psi = setup.build()?;

    let t = Instant::now();
    let reduced = decompose(&psi, &setup.truncation)?.result;
    let t_reduced = t.elapsed();
    let t = Instant::now();
    let dense = brute_force_spectrum_tensor(&psi)?;
    let t_dense = t.elapsed();

    let spec = reduced.expanded_spectrum();
    let worst = dense.iter().zip(&spec).take(50).map(|(d, r)| (d - r).abs() / d).fold(0.0, f64::max);
    println!("top 50 weights: max relative deviation {worst:.3e}");
    println!("reduced {t_reduced:.2?}, dense {t_dense:.2?}");
    println!(
        "K: spectrum {:.8}  g1 {:.8}  direct {:.8}",
        reduced.k,
        schmidt_number_g1(&g1_from_psi(&psi))?,
        brute_force_k(&psi)?
    );
    Ok(())
}
