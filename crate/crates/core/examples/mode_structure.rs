//! Space-time coupling of individual modes and the on-axis node of l != 0.

use stschmidt::analysis::nonseparability;
use stschmidt::presets::{mode_desk, trend_desk};
use stschmidt::schmidt::decompose;

fn main() -> stschmidt::Result<()> {
    let setup = trend_desk();
    let r = decompose(&setup.build()?, &setup.truncation)?.result;
    println!("nonseparability C(l, m)");
    for l in 0..=3 {
        let cs: Vec<String> =
            (0..=3).map(|m| r.mode(l, m).and_then(|u| nonseparability(u, &r.grid)).map(|c| format!("{c:9.5}"))).collect::<Result<_, _>>()?;
        println!("l = {l}: {}", cs.join(" "));
    }

    let setup = mode_desk();
    let r = decompose(&setup.build()?, &setup.truncation)?.result;
    let g = &r.grid;
    println!("\n|u| at the smallest q relative to the mode peak");
    for l in 0..=2 {
        for m in 0..=1 {
            let u = r.mode(l, m)?;
            let peak = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let axis = (0..g.n_omega).map(|iw| u[g.index(0, iw)].norm()).fold(0.0, f64::max);
            println!("l = {l}, m = {m}: {:.4}", axis / peak);
        }
    }
    Ok(())
}
