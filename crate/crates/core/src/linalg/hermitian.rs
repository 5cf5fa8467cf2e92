use std::ops::{Add, Sub};

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::eig::{eig_hermitian, Eigen};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Deviation from Hermiticity tolerated at construction, relative to `max(1, max|m_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction symmetrizes `(m + m†)/2` after checking that the deviation is
/// within [`HERMITIAN_TOL`], so roundoff from upstream arithmetic never leaks
/// an anti-Hermitian part into later computations.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows(), m.cols())));
        }
        if m.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = m.hermitian_deviation();
        if dev > T::tol_floor(HERMITIAN_TOL) * m.max_abs().max(T::one()) {
            return Err(Error::NotHermitian(dev.to_f64_lossy()));
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without the deviation guard; for matrices Hermitian by construction.
    pub(crate) fn symmetrized(m: ComplexMatrix<T>) -> Self {
        debug_assert!(m.is_square());
        let half = T::lit(0.5);
        let n = m.rows();
        let matrix = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(m[(i, i)].re, T::zero())
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * half
            }
        });
        Self { matrix }
    }

    pub fn zeros(n: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n) }
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let d: Vec<Complex<T>> = diag.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self { matrix: ComplexMatrix::from_diag(&d) }
    }

    /// Builds from real row-major entries (must be symmetric).
    pub fn from_real(n: usize, entries: &[T]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(n, n, entries)?)
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(psi: &PureState<T>) -> Self {
        Self::symmetrized(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()))
    }

    /// `|i⟩⟨i|` in dimension `d`.
    pub fn basis_projector(d: usize, i: usize) -> Self {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = Complex::new(T::one(), T::zero());
        Self { matrix: m }
    }

    /// `I/d`
    pub fn maximally_mixed(d: usize) -> Self {
        Self::identity(d).scale(T::one() / T::from_count(d))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn scale(&self, s: T) -> Self {
        Self { matrix: self.matrix.scale_real(s) }
    }

    pub fn transpose(&self) -> Self {
        Self { matrix: self.matrix.transpose() }
    }

    pub fn is_real(&self) -> bool {
        self.matrix.is_real()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.kron(&other.matrix) }
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        Ok(Self::symmetrized(self.matrix.partial_trace(dims, keep)?))
    }

    pub fn permute_subsystems(&self, dims: &[usize], perm: &[usize]) -> Result<Self> {
        Ok(Self { matrix: self.matrix.permute_subsystems(dims, perm)? })
    }

    /// Completely dephasing map: keeps the diagonal, zeros every off-diagonal entry.
    pub fn dephase(&self) -> Self {
        let d: Vec<T> = (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect();
        Self::from_real_diag(&d)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn eig(&self) -> Result<Eigen<T>> {
        eig_hermitian(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        Ok(self.eig()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?.last().copied().unwrap_or_else(T::zero))
    }

    /// `Re tr(A·B)`, the real inner product on Hermitian matrices.
    pub fn inner(&self, other: &Self) -> T {
        self.matrix.trace_product(&other.matrix).re
    }

    pub fn trace_norm(&self) -> Result<T> {
        Ok(self.eigenvalues()?.iter().map(|l| l.abs()).sum())
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> T {
        let n = self.dim();
        let mut m = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.matrix[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn is_diagonal(&self, tol: T) -> bool {
        self.max_off_diagonal() <= tol
    }

    /// Checks positivity (`λ_min ≥ −tol`) and unit trace (within `tol`).
    pub fn check_density(&self, tol: T) -> Result<()> {
        let tr = self.trace();
        if (tr - T::one()).abs() > tol {
            return Err(Error::NotState(format!("trace {tr}")));
        }
        let lmin = self.min_eigenvalue()?;
        if lmin < -tol {
            return Err(Error::NotState(format!("minimum eigenvalue {lmin}")));
        }
        Ok(())
    }

    /// Von Neumann entropy in bits, with `0·log 0 = 0`.
    pub fn entropy_bits(&self) -> Result<T> {
        Ok(shannon_bits(&self.eigenvalues()?))
    }
}

/// Shannon entropy in bits of a (possibly slightly negative from roundoff) distribution.
pub fn shannon_bits<T: Real>(p: &[T]) -> T {
    p.iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| -x * x.log2())
        .sum()
}

impl<T: Real> Add for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;
    fn add(self, rhs: Self) -> HermitianOperator<T> {
        HermitianOperator { matrix: &self.matrix + &rhs.matrix }
    }
}

impl<T: Real> Sub for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;
    fn sub(self, rhs: Self) -> HermitianOperator<T> {
        HermitianOperator { matrix: &self.matrix - &rhs.matrix }
    }
}

/// Normalized pure state vector in the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    amplitudes: Vec<Complex<T>>,
}

/// Normalization tolerance for pure states.
pub const NORM_TOL: f64 = 1e-10;

impl<T: Real> PureState<T> {
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension("empty state vector".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n2: T = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - T::one()).abs() > T::tol_floor(NORM_TOL) {
            return Err(Error::NotNormalized(n2.to_f64_lossy()));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n2: T = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !(n2 > T::zero()) || !n2.is_finite() {
            return Err(Error::NotNormalized(n2.to_f64_lossy()));
        }
        let inv = T::one() / n2.sqrt();
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z * inv).collect() })
    }

    /// Nonnegative real amplitudes `√p_i` for a probability vector.
    pub fn from_probabilities(p: &[T]) -> Result<Self> {
        if p.iter().any(|&x| x < -T::tol_floor(NORM_TOL)) {
            return Err(Error::InvalidParameter("negative probability".into()));
        }
        Self::normalized(p.iter().map(|&x| Complex::new(x.max(T::zero()).sqrt(), T::zero())).collect())
    }

    /// Maximally coherent state `Ψ_d = d^{-1/2} Σ_i |i⟩`.
    pub fn cosdit(d: usize) -> Self {
        let a = T::one() / T::from_count(d).sqrt();
        Self { amplitudes: vec![Complex::new(a, T::zero()); d] }
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut amplitudes = vec![Complex::zero(); d];
        amplitudes[i] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn projector(&self) -> HermitianOperator<T> {
        HermitianOperator::projector(self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| other.amplitudes.iter().map(move |&b| a * b))
            .collect();
        Self { amplitudes }
    }

    /// `⟨self|other⟩`
    pub fn overlap(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::zero(), |acc, (&a, &b)| acc + a.conj() * b)
    }

    /// Zero-pads to dimension `d` (no-op when already that large).
    pub fn padded(&self, d: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        if amplitudes.len() < d {
            amplitudes.resize(d, Complex::zero());
        }
        Self { amplitudes }
    }
}

/// JSON wire format for matrices: `{"dim": n, "re": [[...]], "im": [[...]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl<T: Real> Serialize for HermitianOperator<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let row = |i: usize, f: &dyn Fn(Complex<T>) -> T| -> Vec<f64> {
            (0..n).map(|j| f(self.matrix[(i, j)]).to_f64_lossy()).collect()
        };
        MatrixJson {
            dim: n,
            re: (0..n).map(|i| row(i, &|z| z.re)).collect(),
            im: (0..n).map(|i| row(i, &|z| z.im)).collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for HermitianOperator<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = MatrixJson::deserialize(d)?;
        let n = j.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&j.re) || !shape_ok(&j.im) {
            return Err(D::Error::custom(format!("re/im arrays must be {n}x{n}")));
        }
        let data = (0..n * n)
            .map(|k| Complex::new(T::lit(j.re[k / n][k % n]), T::lit(j.im[k / n][k % n])))
            .collect();
        let m = ComplexMatrix::new(n, n, data).map_err(D::Error::custom)?;
        HermitianOperator::new(m).map_err(D::Error::custom)
    }
}
