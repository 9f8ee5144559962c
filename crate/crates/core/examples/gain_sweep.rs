//! Coherent-mode content of the high-gain state as the gain grows.

use stschmidt::analysis::{mode_width, Axis};
use stschmidt::highgain::{gain_sweep, run};
use stschmidt::presets::highgain_desk;

fn main() -> stschmidt::Result<()> {
    let setup = highgain_desk(1.0);
    let gains = [1.0, 2.0, 4.0, 8.0];
    println!("   g     intensity        K     K(g1)");
    for row in gain_sweep(&setup, &gains)? {
        println!("{:4.1}  {:.4e}  {:8.3}  {:8.3}", row.g, row.intensity, row.k, row.k_g1);
    }

    println!("\nfundamental mode widths");
    for g in [1.0, 8.0] {
        let (_, modes) = run(&highgain_desk(g))?;
        let u = modes.mode(0, 0)?;
        println!(
            "g = {g}: q {:.3e} 1/m, omega {:.3e} rad/s",
            mode_width(u, &modes.grid, Axis::Q)?,
            mode_width(u, &modes.grid, Axis::Omega)?
        );
    }
    Ok(())
}
