//! Quantum channels in (unnormalized) Choi form.
//!
//! The Choi matrix of `N: A → B` is `J = Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)` on `A ⊗ B`,
//! input factor first. A channel acts as `N(ρ) = tr_A((ρᵀ ⊗ I) J)`.

mod diamond;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use diamond::{diamond_distance, phase_unitary, trace_distance_lower_bound, ChannelPair};
#[allow(unused_imports)]
pub(crate) use diamond::diamond_problem;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::scalar::Real;
use crate::sdp::{Domain, MatExpr, Relation, SdpProblem};

/// Tolerance for the CPTP checks on construction.
pub const CPTP_TOL: f64 = 1e-8;
/// Tolerance for unitarity of constructor input.
pub const UNITARY_TOL: f64 = 1e-9;

/// Completely positive trace-preserving map stored as its Choi matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T: Real> {
    dim_in: usize,
    dim_out: usize,
    choi: HermitianOperator<T>,
}

/// Outcome of the MIO test: the largest off-diagonal output functional on
/// incoherent inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MioReport<T> {
    pub is_mio: bool,
    pub max_violation: T,
}

impl<T: Real> Channel<T> {
    /// Validates that `choi` is PSD and `tr_B choi = I_A` within [`CPTP_TOL`].
    pub fn from_choi(dim_in: usize, dim_out: usize, choi: HermitianOperator<T>) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 || choi.dim() != dim_in * dim_out {
            return Err(Error::Dimension(format!(
                "Choi matrix of dimension {} for a {dim_in} → {dim_out} channel",
                choi.dim()
            )));
        }
        let ch = Self { dim_in, dim_out, choi };
        let (tp, lmin) = ch.cptp_violation()?;
        let tol = T::tol_floor(CPTP_TOL);
        if tp > tol {
            return Err(Error::NotCptp(format!("partial trace deviates from identity by {tp:.3e}")));
        }
        if lmin < -tol {
            return Err(Error::NotCptp(format!("Choi matrix has eigenvalue {lmin:.3e}")));
        }
        Ok(ch)
    }

    pub(crate) fn from_choi_unchecked(dim_in: usize, dim_out: usize, choi: HermitianOperator<T>) -> Self {
        debug_assert_eq!(choi.dim(), dim_in * dim_out);
        Self { dim_in, dim_out, choi }
    }

    /// `(max |tr_B J − I|, λ_min(J))`
    pub fn cptp_violation(&self) -> Result<(T, T)> {
        let tr = self.choi.partial_trace(&[self.dim_in, self.dim_out], &[0])?;
        let dev = (tr.matrix() - &ComplexMatrix::identity(self.dim_in)).max_abs();
        Ok((dev, self.choi.min_eigenvalue()?))
    }

    /// `ρ ↦ UρU†`
    pub fn from_unitary(u: &ComplexMatrix<T>) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::Dimension(format!("{}x{} unitary", u.rows(), u.cols())));
        }
        let n = u.rows();
        let dev = (&u.adjoint().matmul(u) - &ComplexMatrix::identity(n)).max_abs();
        if dev > T::tol_floor(UNITARY_TOL) {
            return Err(Error::NotUnitary(dev.to_f64_lossy()));
        }
        Ok(Self::from_choi_unchecked(n, n, vectorized_projector(std::slice::from_ref(u))))
    }

    /// Channel with Kraus operators `K_k` (each `dim_out × dim_in`).
    pub fn from_kraus(kraus: &[ComplexMatrix<T>]) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?;
        let (dout, din) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != dout || k.cols() != din) {
            return Err(Error::Dimension("Kraus operators of different shapes".into()));
        }
        let mut sum = ComplexMatrix::zeros(din, din);
        for k in kraus {
            sum += &k.adjoint().matmul(k);
        }
        let dev = (&sum - &ComplexMatrix::identity(din)).max_abs();
        if dev > T::tol_floor(CPTP_TOL) {
            return Err(Error::NotCptp(format!("Σ K†K deviates from identity by {dev:.3e}")));
        }
        Ok(Self::from_choi_unchecked(din, dout, vectorized_projector(kraus)))
    }

    /// `ρ ↦ tr(ρ)·σ`, with Choi `I ⊗ σ`.
    pub fn constant(dim_in: usize, sigma: &HermitianOperator<T>) -> Result<Self> {
        sigma.check_density(T::tol_floor(CPTP_TOL))?;
        Ok(Self::from_choi_unchecked(dim_in, sigma.dim(), HermitianOperator::identity(dim_in).kron(sigma)))
    }

    /// Measure in the incoherent basis and prepare `σ_i` on outcome `i`.
    pub fn cq(outputs: &[HermitianOperator<T>]) -> Result<Self> {
        let first = outputs.first().ok_or_else(|| Error::InvalidParameter("no output states".into()))?;
        let dout = first.dim();
        if outputs.iter().any(|s| s.dim() != dout) {
            return Err(Error::Dimension("cq outputs of different dimensions".into()));
        }
        let din = outputs.len();
        let mut j = HermitianOperator::zeros(din * dout);
        for (i, s) in outputs.iter().enumerate() {
            s.check_density(T::tol_floor(CPTP_TOL))?;
            j = &j + &HermitianOperator::basis_projector(din, i).kron(s);
        }
        Ok(Self::from_choi_unchecked(din, dout, j))
    }

    pub fn identity(d: usize) -> Self {
        Self::from_unitary(&ComplexMatrix::identity(d)).expect("identity is unitary")
    }

    /// Completely dephasing channel.
    pub fn dephasing(d: usize) -> Self {
        let outs: Vec<_> = (0..d).map(|i| HermitianOperator::basis_projector(d, i)).collect();
        Self::cq(&outs).expect("basis projectors are states")
    }

    /// Real qubit rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`.
    pub fn qubit_rotation(theta: T) -> Self {
        Self::from_unitary(&rotation_matrix(theta)).expect("rotation is unitary")
    }

    /// Pauli Z unitary channel.
    pub fn pauli_z() -> Self {
        Self::from_unitary(&ComplexMatrix::from_real(2, 2, &[T::one(), T::zero(), T::zero(), -T::one()]).expect("2x2"))
            .expect("Pauli Z is unitary")
    }

    #[inline]
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    #[inline]
    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    #[inline]
    pub fn choi(&self) -> &HermitianOperator<T> {
        &self.choi
    }

    /// `N(X)` for an arbitrary (not necessarily Hermitian) input operator.
    pub fn apply_matrix(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let (din, dout) = (self.dim_in, self.dim_out);
        if x.rows() != din || x.cols() != din {
            return Err(Error::Dimension(format!("{}x{} input for a channel on dimension {din}", x.rows(), x.cols())));
        }
        let j = self.choi.matrix();
        let mut out = ComplexMatrix::zeros(dout, dout);
        for a in 0..din {
            for a2 in 0..din {
                let w = x[(a, a2)];
                if w.is_zero() {
                    continue;
                }
                for b in 0..dout {
                    for b2 in 0..dout {
                        out[(b, b2)] += w * j[(a * dout + b, a2 * dout + b2)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
        Ok(HermitianOperator::symmetrized(self.apply_matrix(rho.matrix())?))
    }

    /// `next ∘ self`
    pub fn then(&self, next: &Self) -> Result<Self> {
        if next.dim_in != self.dim_out {
            return Err(Error::Dimension(format!(
                "composing {} → {} with {} → {}",
                self.dim_in, self.dim_out, next.dim_in, next.dim_out
            )));
        }
        let (din, dout) = (self.dim_in, next.dim_out);
        let mut j = ComplexMatrix::zeros(din * dout, din * dout);
        for a in 0..din {
            for a2 in 0..din {
                let mut e = ComplexMatrix::zeros(din, din);
                e[(a, a2)] = Complex::new(T::one(), T::zero());
                let y = next.apply_matrix(&self.apply_matrix(&e)?)?;
                for b in 0..dout {
                    for b2 in 0..dout {
                        j[(a * dout + b, a2 * dout + b2)] = y[(b, b2)];
                    }
                }
            }
        }
        Ok(Self::from_choi_unchecked(din, dout, HermitianOperator::symmetrized(j)))
    }

    /// `self ⊗ other` acting on `A₁A₂ → B₁B₂`.
    pub fn tensor(&self, other: &Self) -> Self {
        let j = self.choi.kron(&other.choi);
        let dims = [self.dim_in, self.dim_out, other.dim_in, other.dim_out];
        let j = j.permute_subsystems(&dims, &[0, 2, 1, 3]).expect("valid permutation");
        Self::from_choi_unchecked(self.dim_in * other.dim_in, self.dim_out * other.dim_out, j)
    }

    /// Largest `|tr((|i⟩⟨i| ⊗ |j⟩⟨k|) J)|` over all `i` and `j ≠ k`.
    pub fn mio_violation(&self) -> T {
        mio_violation_of(self.choi.matrix(), self.dim_in, self.dim_out)
    }

    pub fn is_mio(&self, tol: T) -> MioReport<T> {
        let v = self.mio_violation();
        MioReport { is_mio: v <= tol, max_violation: v }
    }

    /// Outputs `N(|i⟩⟨i|)` on the incoherent basis.
    pub fn basis_outputs(&self) -> Result<Vec<HermitianOperator<T>>> {
        (0..self.dim_in).map(|i| self.apply(&HermitianOperator::basis_projector(self.dim_in, i))).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Constrains the Choi expression `j` on `(in) ⊗ (out)` to map incoherent
/// inputs to incoherent outputs: `j[(i,a),(i,b)] = 0` for all `i`, `a < b`.
pub(crate) fn constrain_mio<T: Real>(p: &mut SdpProblem<T>, j: &MatExpr<T>, din: usize, dout: usize) {
    let minus_i = Complex::new(T::zero(), -T::one());
    for i in 0..din {
        for a in 0..dout {
            for b in a + 1..dout {
                let e = j.entry(i * dout + a, i * dout + b);
                p.constrain(e.clone(), Relation::Eq, T::zero());
                if p.domain == Domain::Complex {
                    p.constrain(e.scaled(minus_i), Relation::Eq, T::zero());
                }
            }
        }
    }
}

/// Field needed to represent all the given operators.
pub(crate) fn domain_for<T: Real>(ops: &[&HermitianOperator<T>]) -> Domain {
    if ops.iter().all(|h| h.is_real()) {
        Domain::Real
    } else {
        Domain::Complex
    }
}

pub(crate) fn mio_violation_of<T: Real>(j: &ComplexMatrix<T>, din: usize, dout: usize) -> T {
    let mut v = T::zero();
    for i in 0..din {
        for a in 0..dout {
            for b in a + 1..dout {
                v = v.max(j[(i * dout + a, i * dout + b)].norm());
            }
        }
    }
    v
}

pub fn rotation_matrix<T: Real>(theta: T) -> ComplexMatrix<T> {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_real(2, 2, &[c, -s, s, c]).expect("2x2")
}

/// `Σ_k |K_k⟩⟩⟨⟨K_k|` with `|K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩`.
fn vectorized_projector<T: Real>(kraus: &[ComplexMatrix<T>]) -> HermitianOperator<T> {
    let (dout, din) = (kraus[0].rows(), kraus[0].cols());
    let n = din * dout;
    let mut j = ComplexMatrix::zeros(n, n);
    for k in kraus {
        let v: Vec<Complex<T>> = (0..n).map(|idx| k[(idx % dout, idx / dout)]).collect();
        j += &ComplexMatrix::outer(&v, &v);
    }
    HermitianOperator::symmetrized(j)
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct ChannelJson<T: Real> {
    dim_in: usize,
    dim_out: usize,
    choi: HermitianOperator<T>,
}

impl<T: Real> Serialize for Channel<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson { dim_in: self.dim_in, dim_out: self.dim_out, choi: self.choi.clone() }.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Channel<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ChannelJson::<T>::deserialize(d)?;
        Channel::from_choi(j.dim_in, j.dim_out, j.choi).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests;
