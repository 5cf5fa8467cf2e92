use rand::Rng;

use super::state::{l1_coherence, log_robustness, pure_state_robustness, relative_entropy_coherence, solve_robustness, state_robustness};
use crate::channels::{constrain_mio, domain_for, Channel};
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, PureState};
use crate::random::haar_pure_state;
use crate::scalar::Real;
use crate::sdp::{solve, BlockId, LinExpr, MatExpr, Relation, ScalarId, SdpProblem, Sense};

/// Number of Haar-random inputs used by [`sampled_cohering_power`] by default.
pub const COHERING_SAMPLES: usize = 200;

/// Purity `tr ρ²` above which an output is treated as a pure state.
const PURE_OUTPUT: f64 = 1.0 - 1e-13;

/// Robustness through the incoherent basis: `max_i C_R(N(|i⟩⟨i|))`.
///
/// Pure outputs use `C_R = C_ℓ1`; mixed ones solve the state program.
pub fn channel_robustness<T: Real>(n: &Channel<T>, tol: f64) -> Result<T> {
    let mut best = T::zero();
    for out in n.basis_outputs()? {
        let purity: T = out.matrix().data().iter().map(|z| z.norm_sqr()).sum();
        let c = if purity >= T::lit(PURE_OUTPUT) { l1_coherence(&out) } else { state_robustness(&out, tol)? };
        best = best.max(c);
    }
    Ok(best)
}

/// `min λ  s.t.  P = J_M − J_N ⪰ 0,  tr_B J_M = λ·I,  J_M incoherence preserving`.
pub(crate) fn channel_primal_problem<T: Real>(n: &Channel<T>) -> Result<(SdpProblem<T>, ScalarId, BlockId)> {
    let (din, dout) = (n.dim_in(), n.dim_out());
    let j_n = MatExpr::hermitian(n.choi());
    let mut p = SdpProblem::new(domain_for(&[n.choi()]), Sense::Minimize);
    let lam = p.free("lambda");
    let pb = p.psd("J_M - J_N", din * dout);
    p.set_objective(LinExpr::scalar(lam));
    let j_m = p.var(pb).add(&j_n)?;
    let marginal = j_m.partial_trace(&[din, dout], &[0])?;
    p.matrix_eq(&marginal, &MatExpr::scaled_identity(&LinExpr::scalar(lam), din))?;
    constrain_mio(&mut p, &j_m, din, dout);
    Ok((p, lam, pb))
}

/// Robustness from the primal Choi-matrix program.
pub fn channel_robustness_primal<T: Real>(n: &Channel<T>, tol: f64) -> Result<T> {
    if n.is_mio(T::zero()).is_mio {
        return Ok(T::zero());
    }
    Ok(solve_robustness(&channel_primal_problem(n)?.0, tol)?.0)
}

/// Constrains `s` to the form `Y ⊗ I + Z` with `Z` supported on the
/// incoherence-preservation functionals; returns the expression for `Y`.
pub(crate) fn constrain_witness_form<T: Real>(p: &mut SdpProblem<T>, s: &MatExpr<T>, din: usize, dout: usize, label: &str) -> Result<MatExpr<T>> {
    let y = p.free_hermitian(label, din);
    let yi = y.kron_right(&crate::linalg::ComplexMatrix::identity(dout));
    let d = s.sub(&yi)?;
    let n = din * dout;
    let minus_i = num_complex::Complex::new(T::zero(), -T::one());
    for r in 0..n {
        for c in r..n {
            let (a, b) = (r / dout, r % dout);
            let (a2, b2) = (c / dout, c % dout);
            if a == a2 && b != b2 {
                continue;
            }
            let e = d.entry(r, c);
            p.constrain(e.clone(), Relation::Eq, T::zero());
            if r != c && p.domain == crate::sdp::Domain::Complex {
                p.constrain(e.scaled(minus_i), Relation::Eq, T::zero());
            }
        }
    }
    Ok(y)
}

/// `max ⟨J_N, S⟩  s.t.  S = Y ⊗ I + Z ⪰ 0,  tr Y = 1`; the optimum is `1 + C_R(N)`.
pub(crate) fn channel_dual_problem<T: Real>(n: &Channel<T>) -> Result<SdpProblem<T>> {
    let (din, dout) = (n.dim_in(), n.dim_out());
    let mut p = SdpProblem::new(domain_for(&[n.choi()]), Sense::Maximize);
    let s = p.psd("S", din * dout);
    let sv = p.var(s);
    p.set_objective(sv.trace_with(n.choi().matrix())?);
    let y = constrain_witness_form(&mut p, &sv, din, dout, "Y")?;
    p.constrain(y.trace(), Relation::Eq, T::one());
    Ok(p)
}

/// Robustness from the witness (dual) Choi-matrix program.
pub fn channel_robustness_dual_sdp<T: Real>(n: &Channel<T>, tol: f64) -> Result<T> {
    if n.is_mio(T::zero()).is_mio {
        return Ok(T::zero());
    }
    Ok(solve_robustness(&channel_dual_problem(n)?, tol)?.0)
}

/// Cohering power in bits, `log₂(1 + C_R(N))`.
pub fn cohering_power<T: Real>(n: &Channel<T>, tol: f64) -> Result<T> {
    Ok(log_robustness(channel_robustness(n, tol)?))
}

/// Sampled lower bound `max_ρ C_LR(N(ρ)) − C_LR(ρ)` over the incoherent basis
/// and `samples` Haar-random pure inputs.
pub fn sampled_cohering_power<T: Real, R: Rng + ?Sized>(n: &Channel<T>, samples: usize, rng: &mut R, tol: f64) -> Result<T> {
    let d = n.dim_in();
    let mut inputs: Vec<PureState<T>> = (0..d).map(|i| PureState::basis(d, i)).collect();
    inputs.extend((0..samples).map(|_| haar_pure_state(d, rng)));
    let mut best = T::neg_infinity();
    for psi in &inputs {
        let out = n.apply(&psi.projector())?;
        let gain = log_robustness(state_robustness(&out, tol)?) - log_robustness(pure_state_robustness(psi));
        best = best.max(gain);
    }
    Ok(best)
}

/// Asymptotic simulation cost (= generating capacity) of a cq channel,
/// `max_i C_r(σ_i)` in bits.
pub fn cq_asymptotic_values<T: Real>(outputs: &[HermitianOperator<T>]) -> Result<T> {
    if outputs.is_empty() {
        return Err(Error::InvalidParameter("no output states".into()));
    }
    let mut best = T::zero();
    for s in outputs {
        best = best.max(relative_entropy_coherence(s)?);
    }
    Ok(best)
}

/// Max-relative entropy `D_max(N‖M) = log₂ min{λ : J_N ⪯ λ J_M}` in bits;
/// `+∞` when no such `λ` exists.
pub fn dmax<T: Real>(n: &Channel<T>, m: &Channel<T>, tol: f64) -> Result<T> {
    if (n.dim_in(), n.dim_out()) != (m.dim_in(), m.dim_out()) {
        return Err(Error::Dimension("channels of different shapes".into()));
    }
    let mut p = SdpProblem::new(domain_for(&[n.choi(), m.choi()]), Sense::Minimize);
    let lam = p.free("lambda");
    p.set_objective(LinExpr::scalar(lam));
    let scaled = MatExpr::scaled_constant(m.choi().matrix(), &LinExpr::scalar(lam));
    p.matrix_psd("lambda J_M - J_N", &scaled.sub(&MatExpr::hermitian(n.choi()))?)?;
    let sol = solve(&p, tol)?;
    match sol.status {
        crate::sdp::SdpStatus::Infeasible => Ok(T::infinity()),
        _ => Ok(sol.optimal_value()?.log2()),
    }
}

/// Log-robustness together with the incoherent operation attaining it,
/// `C_LR(N) = D_max(N‖M*)`.
pub fn log_robustness_via_dmax<T: Real>(n: &Channel<T>, tol: f64) -> Result<(T, Channel<T>)> {
    let (din, dout) = (n.dim_in(), n.dim_out());
    if n.is_mio(T::zero()).is_mio {
        return Ok((T::zero(), n.clone()));
    }
    let (p, _, pb) = channel_primal_problem(n)?;
    let sol = solve(&p, tol)?;
    let l = sol.optimal_value()?;
    let j_m = sol.block(pb) + n.choi();
    let m = Channel::from_choi_unchecked(din, dout, j_m.scale(T::one() / l));
    Ok((l.log2(), m))
}
