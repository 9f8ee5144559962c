//! Writes a run's modes to an STSM container and reads one mode back.

use stschmidt::analysis::nonseparability;
use stschmidt::container::Container;
use stschmidt::export::{mode_name, modes_container, spectrum_csv};
use stschmidt::presets::oracle_desk;
use stschmidt::schmidt::decompose;

fn main() -> stschmidt::Result<()> {
    let setup = oracle_desk();
    let r = decompose(&setup.build()?, &setup.truncation)?.result;
    let c: Vec<f64> = r.modes.iter().map(|u| nonseparability(u, &r.grid)).collect::<Result<_, _>>()?;
    let written = modes_container(&r, &c, "example")?;

    let path = std::env::temp_dir().join("stschmidt-example.stsm");
    written.write(&path)?;
    let back = Container::read(&path)?;
    println!("{} records, {} bytes, identical: {}", back.records.len(), written.to_bytes().len(), back == written);

    let u = back.get(&mode_name(1, 0))?.complex_data()?;
    println!("mode (1, 0): {} samples, first {:.4e}", u.len(), u[0]);
    for line in spectrum_csv(&back)?.lines().take(5) {
        println!("{line}");
    }
    std::fs::remove_file(&path)?;
    Ok(())
}
