//! Schmidt number against pump waist, crystal length and bandwidth.

use stschmidt::analysis::{sweep, KMethod, Scenario, SweepAxis};
use stschmidt::presets::trend_desk;

fn main() -> stschmidt::Result<()> {
    let base = Scenario::LowGain(trend_desk());
    let ramps: [(SweepAxis, Vec<f64>); 3] = [
        (SweepAxis::WaistP, vec![10e-6, 15e-6, 20e-6, 25e-6, 30e-6]),
        (SweepAxis::Length, vec![1e-3, 1.25e-3, 1.5e-3, 1.75e-3, 2e-3]),
        (SweepAxis::DeltaLambdaP, vec![0.2e-9, 0.25e-9, 0.3e-9, 0.35e-9, 0.4e-9]),
    ];
    for (axis, values) in ramps {
        let t = sweep(&base, axis, &values, KMethod::Correlation)?;
        let ks: Vec<String> = t.rows.iter().map(|r| format!("{:.2}", r.k)).collect();
        println!("{:<15} {:?}  K = [{}]", axis.name(), t.trend, ks.join(", "));
    }
    Ok(())
}
