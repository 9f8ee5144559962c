//! Symmetry-reduced Schmidt decomposition: azimuthal transform over the
//! relative angle, then one weighted factorization per OAM index.

mod azimuthal;
mod invariants;
mod kernel;
mod result;

pub use azimuthal::{azimuthal_kernels, azimuthal_kernels_with_weights, parseval, AzimuthalKernel, ParsevalReport};
pub(crate) use azimuthal::weighted_harmonics;
pub use invariants::{check_invariants, Check, InvariantReport};
pub use kernel::{decompose_kernel, KernelDecomposition};
pub(crate) use kernel::{fix_phase, ordering};
pub use result::{assemble, degeneracy, Regime, SchmidtEntry, SchmidtResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biphoton::BiphotonTensor;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Truncation {
    pub l_max: usize,
    pub m_max: usize,
    /// Relative singular-value floor.
    pub tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { l_max: 100, m_max: 100, tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub result: SchmidtResult,
    pub parseval: ParsevalReport,
    /// Largest relative `|A - A^T|` over the retained kernels.
    pub kernel_symmetry: f64,
}

pub fn decompose(psi: &BiphotonTensor, trunc: &Truncation) -> Result<Decomposition> {
    decompose_with_weights(psi, trunc, &psi.grid().weights())
}

/// Full pipeline with explicit pair weights (the grid's own weights in
/// normal use).
pub fn decompose_with_weights(psi: &BiphotonTensor, trunc: &Truncation, weights: &[f64]) -> Result<Decomposition> {
    let kernels = azimuthal_kernels_with_weights(psi, trunc.l_max, weights)?;
    let kernel_symmetry = kernels.iter().map(|k| k.symmetry_defect()).fold(0.0, f64::max);
    let parts: Vec<Result<KernelDecomposition>> =
        kernels.par_iter().map(|k| decompose_kernel(k, trunc.m_max, trunc.tol)).collect();
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let result = assemble(parts, trunc.tol)?;
    Ok(Decomposition { result, parseval: parseval(psi, trunc.l_max), kernel_symmetry })
}
