use num_complex::Complex;

use super::Channel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::scalar::Real;
use crate::sdp::{solve, Domain, LinExpr, MatExpr, SdpProblem, Sense};

/// Two channels with matching input and output dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelPair<T: Real> {
    pub a: Channel<T>,
    pub b: Channel<T>,
}

impl<T: Real> ChannelPair<T> {
    pub fn new(a: Channel<T>, b: Channel<T>) -> Result<Self> {
        if (a.dim_in(), a.dim_out()) != (b.dim_in(), b.dim_out()) {
            return Err(Error::Dimension(format!(
                "channels {} → {} and {} → {}",
                a.dim_in(),
                a.dim_out(),
                b.dim_in(),
                b.dim_out()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn diamond_distance(&self, tol: f64) -> Result<T> {
        diamond_distance(&self.a, &self.b, tol)
    }
}

/// `min λ  s.t.  Z ⪰ J_a − J_b,  Z ⪰ 0,  λ·I ⪰ tr_B Z`, whose optimum is `½‖a − b‖_⋄`.
pub(crate) fn diamond_problem<T: Real>(ja: &HermitianOperator<T>, jb: &HermitianOperator<T>, din: usize, dout: usize) -> Result<SdpProblem<T>> {
    let domain = if ja.is_real() && jb.is_real() { Domain::Real } else { Domain::Complex };
    let mut p = SdpProblem::new(domain, Sense::Minimize);
    let lam = p.free("lambda");
    let z = p.psd("Z", din * dout);
    p.set_objective(LinExpr::scalar(lam));
    let zv = p.var(z);
    let diff = MatExpr::hermitian(&(ja - jb));
    p.matrix_psd("Z-minus-difference", &zv.sub(&diff)?)?;
    let lam_i = MatExpr::scaled_identity(&LinExpr::scalar(lam), din);
    p.matrix_psd("lambda-minus-marginal", &lam_i.sub(&zv.partial_trace(&[din, dout], &[0])?)?)?;
    Ok(p)
}

/// Half diamond-norm distance `½‖a − b‖_⋄ ∈ [0, 1]`.
///
/// Exactly zero for identical Choi matrices; otherwise the larger of the two
/// orderings of the dual program, clamped to `[0, 1]`.
pub fn diamond_distance<T: Real>(a: &Channel<T>, b: &Channel<T>, tol: f64) -> Result<T> {
    let pair = ChannelPair::new(a.clone(), b.clone())?;
    if pair.a.choi() == pair.b.choi() {
        return Ok(T::zero());
    }
    let (din, dout) = (a.dim_in(), a.dim_out());
    let mut best = T::zero();
    for (x, y) in [(a, b), (b, a)] {
        let sol = solve(&diamond_problem(x.choi(), y.choi(), din, dout)?, tol)?;
        best = best.max(sol.optimal_value()?);
    }
    Ok(best.max(T::zero()).min(T::one()))
}

/// `½‖N(ρ) − M(ρ)‖₁` maximized over a list of inputs (a lower bound on the
/// diamond distance without ancilla).
pub fn trace_distance_lower_bound<T: Real>(a: &Channel<T>, b: &Channel<T>, inputs: &[HermitianOperator<T>]) -> Result<T> {
    let mut best = T::zero();
    for rho in inputs {
        let d = &a.apply(rho)? - &b.apply(rho)?;
        best = best.max(d.trace_norm()? * T::lit(0.5));
    }
    Ok(best)
}

/// Unitary `[[1,0],[0,e^{iφ}]]`-style helper used by tests and the CLI.
pub fn phase_unitary<T: Real>(phi: T) -> ComplexMatrix<T> {
    let (s, c) = phi.sin_cos();
    ComplexMatrix::from_diag(&[Complex::new(T::one(), T::zero()), Complex::new(c, s)])
}
