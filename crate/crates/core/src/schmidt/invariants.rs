use std::fmt;

use super::kernel::TIE_TOL;
use super::Decomposition;
use crate::biphoton::BiphotonTensor;

#[derive(Debug, Clone, serde::Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct InvariantReport {
    pub checks: Vec<Check>,
}

impl InvariantReport {
    pub fn push(&mut self, name: &'static str, value: f64, tolerance: f64) {
        let pass = value.is_finite() && value <= tolerance;
        self.checks.push(Check { name, value, tolerance, pass });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<20} {:>12.3e} <= {:<9.1e} {}", c.name, c.value, c.tolerance, if c.pass { "ok" } else { "FAIL" })?;
        }
        Ok(())
    }
}

/// Built-in checks run after every low-gain decomposition.
pub fn check_invariants(psi: &BiphotonTensor, dec: &Decomposition) -> InvariantReport {
    let r = &dec.result;
    let mut rep = InvariantReport::default();
    rep.push("lambda_sum", (r.lambda_sum() - 1.0).abs(), 1e-10);

    // Tied singular values may be reordered by moment, so allow the tie band.
    let mut disorder = 0.0;
    let mut top = 0.0;
    for (i, e) in r.entries.iter().enumerate() {
        if e.m == 0 {
            top = e.lambda;
        }
        if e.lambda < 0.0 {
            disorder += 1.0;
        }
        if i > 0 && r.entries[i - 1].l == e.l && r.entries[i - 1].lambda < e.lambda - 3.0 * TIE_TOL * top {
            disorder += 1.0;
        }
    }
    rep.push("lambda_order", disorder, 0.0);

    let purity: f64 = r.entries.iter().map(|e| e.degeneracy as f64 * e.lambda * e.lambda).sum();
    rep.push("schmidt_number", (r.k * purity - 1.0).abs(), 1e-10);
    rep.push("gram", r.gram_defect(), 1e-8);
    let phase = r.entries.iter().filter_map(|e| e.phase_residual).fold(0.0, f64::max);
    rep.push("phase_alignment", phase, 1e-8);
    rep.push("parseval", dec.parseval.defect(), 1e-10);
    rep.push("kernel_symmetry", dec.kernel_symmetry, 1e-12);
    rep.push("evenness", psi.evenness_defect(), 0.0);
    rep.push("exchange", psi.exchange_defect(), 0.0);
    rep
}
