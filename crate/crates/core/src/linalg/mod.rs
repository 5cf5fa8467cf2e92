//! Dense complex linear algebra: matrices, Hermitian operators, pure states,
//! Kronecker products, partial traces, dephasing and eigendecomposition.
//!
//! The incoherent basis is the computational basis of each tensor factor.

mod eig;
mod hermitian;
mod matrix;

pub use eig::{eig_hermitian, Eigen};
#[allow(unused_imports)]
pub(crate) use eig::inv_sqrt_psd;
pub use hermitian::{shannon_bits, HermitianOperator, PureState, HERMITIAN_TOL, NORM_TOL};
pub use matrix::ComplexMatrix;
#[allow(unused_imports)]
pub(crate) use matrix::{permutation_map, TracePlan};

use crate::error::Result;
use crate::scalar::Real;

pub fn kron<T: Real>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> HermitianOperator<T> {
    a.kron(b)
}

pub fn partial_trace<T: Real>(
    m: &HermitianOperator<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<HermitianOperator<T>> {
    m.partial_trace(dims, keep)
}

pub fn dephase<T: Real>(m: &HermitianOperator<T>) -> HermitianOperator<T> {
    m.dephase()
}
