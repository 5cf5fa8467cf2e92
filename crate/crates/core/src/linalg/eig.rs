//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted in descending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> Eigen<T> {
    /// `V diag(f(λ)) V†`
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * fl[k])
        })
    }

    pub fn column(&self, k: usize) -> Vec<Complex<T>> {
        (0..self.values.len()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Diagonalizes a Hermitian matrix. Only the upper triangle is trusted; the
/// caller is responsible for Hermiticity.
pub fn eig_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<Eigen<T>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("eigendecomposition of {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(m[(i, i)].re, T::zero())
        } else if i < j {
            m[(i, j)]
        } else {
            m[(j, i)].conj()
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(T::min_positive_value());
    let eps = T::epsilon();

    let mut converged = n < 2;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigNoConvergence { sweeps, residual: off_norm(&a).to_f64_lossy() });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= eps * eps * scale {
                    a[(p, q)] = Complex::zero();
                    a[(q, p)] = Complex::zero();
                    continue;
                }
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                // Phase-rotate q so the pivot is real, then apply a real Givens rotation.
                let phase = apq / mag;
                let w = phase.conj();
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // G = diag(1, w)·[[c, s], [-s, c]]
                let g00 = Complex::new(c, T::zero());
                let g01 = Complex::new(s, T::zero());
                let g10 = w * (-s);
                let g11 = w * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * g00 + akq * g10;
                    a[(k, q)] = akp * g01 + akq * g11;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
                    a[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * g00 + vkq * g10;
                    v[(k, q)] = vkp * g01 + vkq * g11;
                }
            }
        }
        converged = off_norm(&a) <= eps * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Eigen { values, vectors })
}

fn off_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Principal inverse square root of a positive definite Hermitian matrix.
pub(crate) fn inv_sqrt_psd<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let e = eig_hermitian(m)?;
    let floor = T::epsilon() * e.values[0].abs().max(T::one());
    if e.values.iter().any(|&l| l <= floor) {
        return Err(Error::InvalidParameter("inverse square root of a singular matrix".into()));
    }
    Ok(e.reconstruct_with(|l| T::one() / l.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal_input() {
        let m = M::from_diag(&[c(1., 0.), c(3., 0.)]);
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
    }

    #[test]
    fn plus_projector_and_pauli_x() {
        let plus = M::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let e = eig_hermitian(&plus).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && e.values[1].abs() < 1e-14);
        let x = M::from_real(2, 2, &[0., 1., 1., 0.]).unwrap();
        let e = eig_hermitian(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = M::new(
            3,
            3,
            vec![
                c(2., 0.), c(0.5, -1.0), c(0.0, 0.3),
                c(0.5, 1.0), c(-1., 0.), c(0.7, 0.2),
                c(0.0, -0.3), c(0.7, -0.2), c(0.5, 0.),
            ],
        )
        .unwrap();
        let e = eig_hermitian(&m).unwrap();
        let r = e.reconstruct_with(|l| l);
        assert!((&r - &m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let vv = e.vectors.adjoint().matmul(&e.vectors);
        assert!((&vv - &M::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = M::new(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let e = eig_hermitian(&y).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
    }
}
