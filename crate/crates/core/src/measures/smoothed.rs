use super::channel::{channel_dual_problem, channel_primal_problem, constrain_witness_form};
use super::state::{log_robustness, solve_robustness};
use crate::channels::{constrain_mio, domain_for, Channel};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;
use crate::sdp::{LinExpr, MatExpr, Relation, SdpProblem, Sense};

/// A channel together with a half-diamond-norm smoothing radius.
#[derive(Clone, Debug)]
pub struct SmoothedQuery<T: Real> {
    pub channel: Channel<T>,
    pub epsilon: T,
}

impl<T: Real> SmoothedQuery<T> {
    pub fn new(channel: Channel<T>, epsilon: T) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { channel, epsilon })
    }

    pub fn robustness(&self, tol: f64) -> Result<T> {
        smoothed_channel_robustness(&self.channel, self.epsilon, tol)
    }

    pub fn log_robustness(&self, tol: f64) -> Result<T> {
        smoothed_log_robustness(&self.channel, self.epsilon, tol)
    }
}

pub(crate) fn check_epsilon<T: Real>(eps: T) -> Result<()> {
    if !(eps >= T::zero() && eps < T::one()) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1), got {eps}")));
    }
    Ok(())
}

/// Primal program over `J_M`, the smoothed channel `J_L` and a diamond-norm witness `V`:
///
/// `min λ  s.t.  J_M ⪰ J_L ⪰ 0,  V ⪰ 0,  V ⪰ J_L − J_N,  tr_B V ⪯ ε·I,
///  tr_B J_L = I,  tr_B J_M = λ·I,  J_M incoherence preserving`.
pub(crate) fn smoothed_primal_problem<T: Real>(n: &Channel<T>, eps: T) -> Result<SdpProblem<T>> {
    let (din, dout) = (n.dim_in(), n.dim_out());
    let dims = [din, dout];
    let j_n = MatExpr::hermitian(n.choi());
    let mut p = SdpProblem::new(domain_for(&[n.choi()]), Sense::Minimize);
    let lam = p.free("lambda");
    let pb = p.psd("J_M - J_L", din * dout);
    let lb = p.psd("J_L", din * dout);
    let vb = p.psd("V", din * dout);
    p.set_objective(LinExpr::scalar(lam));
    let (pv, lv, vv) = (p.var(pb), p.var(lb), p.var(vb));
    let j_m = pv.add(&lv)?;
    p.matrix_psd("V - J_L + J_N", &vv.sub(&lv)?.add(&j_n)?)?;
    let eps_i = MatExpr::constant(&ComplexMatrix::identity(din).scale_real(eps));
    p.matrix_psd("eps I - tr_B V", &eps_i.sub(&vv.partial_trace(&dims, &[0])?)?)?;
    p.matrix_eq(&lv.partial_trace(&dims, &[0])?, &MatExpr::constant(&ComplexMatrix::identity(din)))?;
    p.matrix_eq(&j_m.partial_trace(&dims, &[0])?, &MatExpr::scaled_identity(&LinExpr::scalar(lam), din))?;
    constrain_mio(&mut p, &j_m, din, dout);
    Ok(p)
}

/// Lagrange dual of [`smoothed_primal_problem`]:
///
/// `max tr W − ⟨Δ, J_N⟩ − ε·tr Ω  s.t.  S = Y ⊗ I + Z ⪰ 0,  S + Δ ⪰ W ⊗ I,
///  Ω ⊗ I ⪰ Δ ⪰ 0,  Ω ⪰ 0,  tr Y = 1`.
pub(crate) fn smoothed_dual_problem<T: Real>(n: &Channel<T>, eps: T) -> Result<SdpProblem<T>> {
    let (din, dout) = (n.dim_in(), n.dim_out());
    let id_out = ComplexMatrix::identity(dout);
    let mut p = SdpProblem::new(domain_for(&[n.choi()]), Sense::Maximize);
    let sb = p.psd("S", din * dout);
    let db = p.psd("Delta", din * dout);
    let ob = p.psd("Omega", din);
    let (sv, dv, ov) = (p.var(sb), p.var(db), p.var(ob));
    let y = constrain_witness_form(&mut p, &sv, din, dout, "Y")?;
    p.constrain(y.trace(), Relation::Eq, T::one());
    let w = p.free_hermitian("W", din);
    p.matrix_psd("S + Delta - W x I", &sv.add(&dv)?.sub(&w.kron_right(&id_out))?)?;
    p.matrix_psd("Omega x I - Delta", &ov.kron_right(&id_out).sub(&dv)?)?;
    let obj = w
        .trace()
        .minus(&dv.trace_with(n.choi().matrix())?)
        .minus(&ov.trace().scaled(num_complex::Complex::new(eps, T::zero())));
    p.set_objective(obj);
    Ok(p)
}

/// Smallest robustness within half-diamond distance `ε` of `n`.
///
/// At `ε = 0` the unsmoothed primal is solved directly.
pub fn smoothed_channel_robustness<T: Real>(n: &Channel<T>, eps: T, tol: f64) -> Result<T> {
    check_epsilon(eps)?;
    if n.is_mio(T::zero()).is_mio {
        return Ok(T::zero());
    }
    let problem = if eps == T::zero() { channel_primal_problem(n)?.0 } else { smoothed_primal_problem(n, eps)? };
    Ok(solve_robustness(&problem, tol)?.0)
}

/// Smoothed robustness from the dual program.
pub fn smoothed_channel_robustness_dual<T: Real>(n: &Channel<T>, eps: T, tol: f64) -> Result<T> {
    check_epsilon(eps)?;
    if n.is_mio(T::zero()).is_mio {
        return Ok(T::zero());
    }
    let problem = if eps == T::zero() { channel_dual_problem(n)? } else { smoothed_dual_problem(n, eps)? };
    Ok(solve_robustness(&problem, tol)?.0)
}

/// `log₂(1 + C_R^ε(N))` in bits.
pub fn smoothed_log_robustness<T: Real>(n: &Channel<T>, eps: T, tol: f64) -> Result<T> {
    Ok(log_robustness(smoothed_channel_robustness(n, eps, tol)?))
}

/// Regularized smoothed log-robustness `C_LR^ε(N^{⊗k}) / k` for a small number of copies.
pub fn smoothed_log_robustness_copies<T: Real>(n: &Channel<T>, eps: T, copies: usize, tol: f64) -> Result<T> {
    if copies == 0 || copies > 2 {
        return Err(Error::InvalidParameter(format!("copies must be 1 or 2, got {copies}")));
    }
    let nk = if copies == 2 { n.tensor(n) } else { n.clone() };
    Ok(smoothed_log_robustness(&nk, eps, tol)? / T::from_count(copies))
}
