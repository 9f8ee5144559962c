use faer::Mat;
use num_complex::Complex64 as C64;

use super::azimuthal::AzimuthalKernel;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg::{hermitian_eigen, svd_full};

/// Relative asymmetry below which a kernel is treated as `A = A^T`.
const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues of the real embedding below this fraction of the largest are
/// numerically indistinguishable from zero.
const TAKAGI_FLOOR: f64 = 1e-13;
/// Relative gap under which two Schmidt weights count as tied.
pub(crate) const TIE_TOL: f64 = 1e-10;

/// `A = sum_m s_m left_m right_m^T` in weighted coordinates (unit vectors in
/// C^P); columns are ordered by the deterministic ordering contract.
#[derive(Debug, Clone)]
pub struct KernelDecomposition {
    pub l: usize,
    pub singular_values: Vec<f64>,
    pub left: Mat<C64>,
    pub right: Mat<C64>,
    pub weights: Vec<f64>,
    pub grid: GridSpec,
    /// True when the symmetric (Takagi) route was used.
    pub symmetric: bool,
}

impl KernelDecomposition {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// Left mode on the grid, orthonormal under `q dq domega`.
    pub fn left_mode(&self, m: usize) -> Vec<C64> {
        unweight(self.left.col(m).iter().copied(), &self.weights)
    }

    pub fn right_mode(&self, m: usize) -> Vec<C64> {
        unweight(self.right.col(m).iter().copied(), &self.weights)
    }

    /// `beta = arg <u, v>` and the largest `|v - e^{i beta} u|` in weighted
    /// coordinates.
    pub fn phase_alignment(&self, m: usize) -> (f64, f64) {
        let u = self.left.col(m);
        let v = self.right.col(m);
        let ip: C64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
        let beta = ip.arg();
        let rot = C64::from_polar(1.0, beta);
        let resid = u.iter().zip(v.iter()).map(|(a, b)| (b - rot * a).norm()).fold(0.0, f64::max);
        (beta, resid)
    }
}

fn unweight(x: impl Iterator<Item = C64>, w: &[f64]) -> Vec<C64> {
    x.zip(w).map(|(v, w)| v / w.sqrt()).collect()
}

/// Rotates `x` so its largest-magnitude entry (first on ties) is real positive;
/// returns the applied unit factor.
pub(crate) fn fix_phase(x: &mut [C64]) -> C64 {
    let mut best = 0;
    let mut mag = -1.0;
    for (i, v) in x.iter().enumerate() {
        if v.norm() > mag {
            mag = v.norm();
            best = i;
        }
    }
    if mag <= 0.0 {
        return C64::new(1.0, 0.0);
    }
    let rot = x[best].conj() / mag;
    x.iter_mut().for_each(|v| *v *= rot);
    rot
}

/// Descending order with ties resolved by the first moments of |u|^2 in
/// omega, then q. `vecs[j]` holds weighted coordinates.
pub(crate) fn ordering(values: &[f64], vecs: &[Vec<C64>], grid: &GridSpec) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let top = values.iter().cloned().fold(0.0, f64::max);
    let moment = |j: usize| {
        let (mut mw, mut mq) = (0.0, 0.0);
        for (mu, v) in vecs[j].iter().enumerate() {
            let p = v.norm_sqr();
            mw += p * grid.omega_of(mu);
            mq += p * grid.q_of(mu);
        }
        (mw, mq)
    };
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end - 1]] - values[idx[end]] <= TIE_TOL * top {
            end += 1;
        }
        if end - start > 1 {
            let cluster = &mut idx[start..end];
            let keys: Vec<(usize, (f64, f64))> = cluster.iter().map(|&j| (j, moment(j))).collect();
            let mut keyed = keys;
            keyed.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.1 .1.total_cmp(&b.1 .1)).then(a.0.cmp(&b.0)));
            for (slot, (j, _)) in cluster.iter_mut().zip(keyed) {
                *slot = j;
            }
        }
        start = end;
    }
    idx
}

/// Singular value decomposition of one weighted kernel.
///
/// Symmetric kernels go through the Takagi factorization `A = U S U^T`,
/// which pins right modes to left modes even inside degenerate clusters;
/// anything else falls back to a general complex SVD.
pub fn decompose_kernel(kernel: &AzimuthalKernel, m_max: usize, tol: f64) -> Result<KernelDecomposition> {
    if !(tol >= 0.0) {
        return Err(Error::Config(format!("singular value floor {tol} must be nonnegative")));
    }
    let a = kernel.matrix();
    if !a.as_ref().is_all_finite() {
        return Err(Error::Numerical(format!("kernel l = {} has non-finite entries", kernel.l)));
    }
    let symmetric = kernel.symmetry_defect() <= SYMMETRY_TOL;
    let (values, lefts, rights) = if symmetric { takagi(kernel)? } else { general_svd(kernel)? };

    let order = ordering(&values, &lefts, kernel.grid());
    let s0 = order.first().map(|&j| values[j]).unwrap_or(0.0);
    let floor = s0 * tol.max(if symmetric { TAKAGI_FLOOR } else { 0.0 });
    let keep: Vec<usize> = order.into_iter().filter(|&j| values[j] > floor).take(m_max).collect();

    let p = kernel.dim();
    let r = keep.len();
    let left = Mat::from_fn(p, r, |i, c| lefts[keep[c]][i]);
    let right = Mat::from_fn(p, r, |i, c| rights[keep[c]][i]);
    Ok(KernelDecomposition {
        l: kernel.l,
        singular_values: keep.iter().map(|&j| values[j]).collect(),
        left,
        right,
        weights: kernel.weights().to_vec(),
        grid: kernel.grid().clone(),
        symmetric,
    })
}

type Factors = (Vec<f64>, Vec<Vec<C64>>, Vec<Vec<C64>>);

fn takagi(kernel: &AzimuthalKernel) -> Result<Factors> {
    let a = kernel.matrix();
    let p = kernel.dim();
    // [[Re A, Im A], [Im A, -Re A]] has eigenpairs (+s, [x; y]) with
    // A conj(x + iy) = s (x + iy).
    let emb = Mat::<f64>::from_fn(2 * p, 2 * p, |i, j| {
        let z = a[(i % p, j % p)];
        match (i < p, j < p) {
            (true, true) => z.re,
            (false, false) => -z.re,
            _ => z.im,
        }
    });
    let (s, u) = hermitian_eigen(&emb).map_err(|e| Error::Numerical(format!("l = {}: {e}", kernel.l)))?;
    let mut values = Vec::new();
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    for c in (0..2 * p).rev() {
        let sv = s[c];
        if !(sv > 0.0) {
            break;
        }
        let mut q: Vec<C64> = (0..p).map(|i| C64::new(u[(i, c)], u[(i + p, c)])).collect();
        fix_phase(&mut q);
        let v: Vec<C64> = (0..p)
            .map(|i| (0..p).map(|j| a[(i, j)] * q[j].conj()).sum::<C64>() / sv)
            .collect();
        values.push(sv);
        lefts.push(q);
        rights.push(v);
    }
    Ok((values, lefts, rights))
}

fn general_svd(kernel: &AzimuthalKernel) -> Result<Factors> {
    let a = kernel.matrix();
    let p = kernel.dim();
    let (s, u, v) = svd_full(a).map_err(|e| Error::Numerical(format!("l = {}: {e}", kernel.l)))?;
    let mut values = Vec::new();
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    for c in 0..s.len() {
        let mut x: Vec<C64> = (0..p).map(|i| u[(i, c)]).collect();
        let rot = fix_phase(&mut x);
        // A = U S V^H, so the transposed right factor is conj(V), counter-rotated.
        let y: Vec<C64> = (0..p).map(|i| v[(i, c)].conj() * rot.conj()).collect();
        values.push(s[c]);
        lefts.push(x);
        rights.push(y);
    }
    Ok((values, lefts, rights))
}
