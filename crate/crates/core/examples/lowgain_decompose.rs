//! Reduced decomposition of a narrow-band state and its leading modes.

use stschmidt::correlation::schmidt_number_reduced;
use stschmidt::presets::trend_desk;
use stschmidt::schmidt::{check_invariants, decompose};

fn main() -> stschmidt::Result<()> {
    let setup = trend_desk();
    let psi = setup.build()?;
    let dec = decompose(&psi, &setup.truncation)?;
    let r = &dec.result;

    println!("K = {:.6}  (correlation integral {:.6})", r.k, schmidt_number_reduced(&psi)?);
    println!("{} modes, captured weight {:.10}, harmonic tail {:.2e}", r.len(), r.captured, dec.parseval.tail);

    let mut order: Vec<usize> = (0..r.len()).collect();
    order.sort_by(|&a, &b| r.entries[b].lambda.total_cmp(&r.entries[a].lambda));
    println!("\n  l  m  deg      lambda");
    for &j in order.iter().take(10) {
        let e = &r.entries[j];
        println!("{:3} {:2} {:4}  {:.6e}", e.l, e.m, e.degeneracy, e.lambda);
    }
    print!("\n{}", check_invariants(&psi, &dec));
    Ok(())
}
