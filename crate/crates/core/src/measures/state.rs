use num_complex::Complex;

use crate::channels::domain_for;
use crate::error::{Error, Result};
use crate::linalg::{shannon_bits, HermitianOperator, PureState};
use crate::scalar::Real;
use crate::sdp::{solve, LinExpr, MatExpr, SdpProblem, SdpSolution, Sense};

/// Amplitude magnitude below which a coefficient does not count towards the coherence rank.
pub const RANK_THRESHOLD: f64 = 1e-9;

/// Density-matrix check tolerance for measure inputs.
pub(crate) const STATE_TOL: f64 = 1e-8;

fn check_state<T: Real>(rho: &HermitianOperator<T>) -> Result<()> {
    rho.check_density(T::tol_floor(STATE_TOL))
}

/// `min Σ_i t_i  s.t.  diag(t) − ρ ⪰ 0, t ≥ 0`; the optimum is `1 + C_R(ρ)`.
pub(crate) fn robustness_primal_problem<T: Real>(rho: &HermitianOperator<T>) -> SdpProblem<T> {
    let d = rho.dim();
    let mut p = SdpProblem::new(domain_for(&[rho]), Sense::Minimize);
    let ts: Vec<LinExpr<T>> = (0..d).map(|i| LinExpr::scalar(p.nonneg(format!("t{i}")))).collect();
    let obj = ts.iter().fold(LinExpr::zero(), |acc, t| acc.plus(t));
    let diag = MatExpr::diagonal(ts);
    p.set_objective(obj);
    p.matrix_psd("diag(t) - rho", &diag.sub(&MatExpr::hermitian(rho)).expect("same shape"))
        .expect("square");
    p
}

/// `max tr(ρS)  s.t.  S ⪰ 0, S_jj = 1`; the optimum is `1 + C_R(ρ)`.
pub(crate) fn robustness_dual_problem<T: Real>(rho: &HermitianOperator<T>) -> SdpProblem<T> {
    let d = rho.dim();
    let mut p = SdpProblem::new(domain_for(&[rho]), Sense::Maximize);
    let s = p.psd("S", d);
    let sv = p.var(s);
    p.set_objective(sv.trace_with(rho.matrix()).expect("square"));
    for j in 0..d {
        p.constrain(sv.entry(j, j).clone(), crate::sdp::Relation::Eq, T::one());
    }
    p
}

pub(crate) fn solve_robustness<T: Real>(problem: &SdpProblem<T>, tol: f64) -> Result<(T, SdpSolution<T>)> {
    let sol = solve(problem, tol)?;
    let v = sol.optimal_value()? - T::one();
    Ok((v.max(T::zero()), sol))
}

/// Robustness of coherence via the primal program over incoherent mixtures.
pub fn state_robustness<T: Real>(rho: &HermitianOperator<T>, tol: f64) -> Result<T> {
    check_state(rho)?;
    if rho.is_diagonal(T::zero()) {
        return Ok(T::zero());
    }
    Ok(solve_robustness(&robustness_primal_problem(rho), tol)?.0)
}

/// Robustness of coherence via the dual witness program.
pub fn state_robustness_dual<T: Real>(rho: &HermitianOperator<T>, tol: f64) -> Result<T> {
    check_state(rho)?;
    if rho.is_diagonal(T::zero()) {
        return Ok(T::zero());
    }
    Ok(solve_robustness(&robustness_dual_problem(rho), tol)?.0)
}

/// Closed form for pure states: `(Σ_i |c_i|)² − 1`.
pub fn pure_state_robustness<T: Real>(psi: &PureState<T>) -> T {
    let s: T = psi.amplitudes().iter().map(|z| z.norm()).sum();
    (s * s - T::one()).max(T::zero())
}

/// `C_LR = log₂(1 + C_R)`.
pub fn log_robustness<T: Real>(c_r: T) -> T {
    (T::one() + c_r).log2()
}

/// `Σ_{i≠j} |ρ_ij|`
pub fn l1_coherence<T: Real>(rho: &HermitianOperator<T>) -> T {
    let d = rho.dim();
    let mut s = T::zero();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += rho.get(i, j).norm();
            }
        }
    }
    s
}

/// `S(Δ(ρ)) − S(ρ)` in bits.
pub fn relative_entropy_coherence<T: Real>(rho: &HermitianOperator<T>) -> Result<T> {
    check_state(rho)?;
    let diag = rho.diagonal();
    Ok((shannon_bits(&diag) - rho.entropy_bits()?).max(T::zero()))
}

/// Number of amplitudes above [`RANK_THRESHOLD`] in magnitude.
pub fn coherence_rank<T: Real>(psi: &PureState<T>) -> usize {
    let thr = T::lit(RANK_THRESHOLD);
    psi.amplitudes().iter().filter(|z| z.norm() > thr).count().max(1)
}

/// Largest diagonal entry.
pub fn lambda1<T: Real>(rho: &HermitianOperator<T>) -> T {
    rho.diagonal().into_iter().fold(T::zero(), T::max)
}

/// Largest squared amplitude of a pure state.
pub fn lambda1_pure<T: Real>(psi: &PureState<T>) -> T {
    psi.probabilities().into_iter().fold(T::zero(), T::max)
}

/// Recognizes rank-one density matrices and returns the state vector.
pub fn as_pure_state<T: Real>(rho: &HermitianOperator<T>) -> Result<Option<PureState<T>>> {
    let e = rho.eig()?;
    let tol = T::tol_floor(1e-10);
    if (e.values[0] - T::one()).abs() > tol || e.values[1..].iter().any(|l| l.abs() > tol) {
        return Ok(None);
    }
    let v = e.column(0);
    // Fix the global phase so the largest amplitude is real positive.
    let k = (0..v.len())
        .max_by(|&a, &b| v[a].norm().partial_cmp(&v[b].norm()).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::Dimension("empty state".into()))?;
    let phase = v[k].conj() / v[k].norm();
    let v: Vec<Complex<T>> = v.iter().map(|z| z * phase).collect();
    Ok(Some(PureState::normalized(v)?))
}
