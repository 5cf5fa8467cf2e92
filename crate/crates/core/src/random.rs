//! Random states and channels for sampling-based checks.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::{inv_sqrt_psd, ComplexMatrix, HermitianOperator, PureState};
use crate::scalar::Real;

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re), T::lit(im))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn haar_pure_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState<T> {
    loop {
        let v: Vec<Complex<T>> = (0..d).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Random density matrix `GG†/tr(GG†)` from a `d × d` Ginibre matrix.
pub fn random_density<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator<T> {
    let g = ginibre::<T, R>(d, d, rng);
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    HermitianOperator::symmetrized(w.scale_real(T::one() / tr))
}

/// Projector onto a Haar-random pure state.
pub fn random_pure_density<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator<T> {
    haar_pure_state::<T, R>(d, rng).projector()
}

/// Normalizes `Σ_k K_k†K_k` to the identity by `K_k ↦ K_k S^{-1/2}`.
fn normalize_kraus<T: Real>(kraus: Vec<ComplexMatrix<T>>) -> Result<Vec<ComplexMatrix<T>>> {
    let din = kraus[0].cols();
    let mut s = ComplexMatrix::zeros(din, din);
    for k in &kraus {
        s += &k.adjoint().matmul(k);
    }
    let r = inv_sqrt_psd(&s)?;
    Ok(kraus.iter().map(|k| k.matmul(&r)).collect())
}

/// Random channel from `n_kraus` Ginibre Kraus operators.
pub fn random_channel<T: Real, R: Rng + ?Sized>(din: usize, dout: usize, n_kraus: usize, rng: &mut R) -> Result<Channel<T>> {
    if n_kraus == 0 {
        return Err(Error::InvalidParameter("at least one Kraus operator required".into()));
    }
    let kraus = (0..n_kraus).map(|_| ginibre::<T, R>(dout, din, rng)).collect();
    Channel::from_kraus(&normalize_kraus(kraus)?)
}

/// Random unitary from the polar part of a Ginibre matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix<T>> {
    let g = ginibre::<T, R>(d, d, rng);
    Ok(g.matmul(&inv_sqrt_psd(&g.adjoint().matmul(&g))?))
}

/// Random maximally incoherent operation.
///
/// Kraus operators map each basis state to a random basis state with a random
/// amplitude; after normalization the candidate is kept only if it passes the
/// MIO test.
pub fn random_mio<T: Real, R: Rng + ?Sized>(din: usize, dout: usize, n_kraus: usize, rng: &mut R) -> Result<Channel<T>> {
    for _ in 0..100 {
        let kraus: Vec<ComplexMatrix<T>> = (0..n_kraus.max(1))
            .map(|_| {
                let mut k = ComplexMatrix::zeros(dout, din);
                for i in 0..din {
                    k[(rng.random_range(0..dout), i)] = gaussian(rng);
                }
                k
            })
            .collect();
        let Ok(kraus) = normalize_kraus(kraus) else { continue };
        let ch = Channel::from_kraus(&kraus)?;
        if ch.is_mio(T::tol_floor(1e-10)).is_mio {
            return Ok(ch);
        }
    }
    // One Kraus operator per input basis state always gives a diagonal Σ K†K.
    let kraus: Vec<ComplexMatrix<T>> = (0..din)
        .map(|i| {
            let mut k = ComplexMatrix::zeros(dout, din);
            k[(rng.random_range(0..dout), i)] = gaussian(rng);
            k
        })
        .collect();
    if let Ok(kraus) = normalize_kraus(kraus) {
        return Channel::from_kraus(&kraus);
    }
    Err(Error::InvalidParameter("could not sample an incoherent operation".into()))
}
