//! Dense factorizations pinned to faer's QR-iteration back ends.
//!
//! The divide-and-conquer paths lose relative accuracy on eigenvalues far
//! below the largest one, which the small tail of a Schmidt spectrum needs.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors, SelfAdjointEvdParams};
use faer::linalg::svd::{svd, svd_scratch, ComputeSvdVectors, SvdParams};
use faer::diag::Diag;
use faer::traits::ComplexField;
use faer::{Auto, Mat, Par};

use crate::error::{Error, Result};

/// Eigenvalues (ascending, as real parts) and eigenvectors of a
/// self-adjoint matrix; only the lower triangle is read.
pub(crate) fn hermitian_eigen<T: ComplexField>(a: &Mat<T>) -> Result<(Vec<T::Real>, Mat<T>)> {
    let n = a.nrows();
    let mut params = <SelfAdjointEvdParams as Auto<T>>::auto();
    params.recursion_threshold = usize::MAX;
    let mut mem = MemBuffer::new(self_adjoint_evd_scratch::<T>(n, ComputeEigenvectors::Yes, Par::Seq, params.into()));
    let mut s = Diag::<T>::zeros(n);
    let mut u = Mat::<T>::zeros(n, n);
    self_adjoint_evd(a.as_ref(), s.as_mut(), Some(u.as_mut()), Par::Seq, MemStack::new(&mut mem), params.into())
        .map_err(|e| Error::Numerical(format!("eigensolver did not converge: {e:?}")))?;
    let vals = s.column_vector().iter().map(|x| T::real_part_impl(x)).collect();
    Ok((vals, u))
}

/// Thin SVD `A = U S V^H`; singular values descending.
pub(crate) fn svd_full<T: ComplexField>(a: &Mat<T>) -> Result<(Vec<T::Real>, Mat<T>, Mat<T>)> {
    let (m, n) = (a.nrows(), a.ncols());
    let k = m.min(n);
    let mut params = <SvdParams as Auto<T>>::auto();
    params.recursion_threshold = usize::MAX;
    let mut mem = MemBuffer::new(svd_scratch::<T>(m, n, ComputeSvdVectors::Thin, ComputeSvdVectors::Thin, Par::Seq, params.into()));
    let mut s = Diag::<T>::zeros(k);
    let mut u = Mat::<T>::zeros(m, k);
    let mut v = Mat::<T>::zeros(n, k);
    svd(a.as_ref(), s.as_mut(), Some(u.as_mut()), Some(v.as_mut()), Par::Seq, MemStack::new(&mut mem), params.into())
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let vals = s.column_vector().iter().map(|x| T::real_part_impl(x)).collect();
    Ok((vals, u, v))
}

/// Singular values only, descending.
pub(crate) fn singular_values<T: ComplexField>(a: &Mat<T>) -> Result<Vec<T::Real>> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut params = <SvdParams as Auto<T>>::auto();
    params.recursion_threshold = usize::MAX;
    let mut mem = MemBuffer::new(svd_scratch::<T>(m, n, ComputeSvdVectors::No, ComputeSvdVectors::No, Par::Seq, params.into()));
    let mut s = Diag::<T>::zeros(m.min(n));
    svd(a.as_ref(), s.as_mut(), None, None, Par::Seq, MemStack::new(&mut mem), params.into())
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    Ok(s.column_vector().iter().map(|x| T::real_part_impl(x)).collect())
}
