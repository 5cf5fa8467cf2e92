use super::SimulationQuery;
use crate::channels::{constrain_mio, domain_for, Channel};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::scalar::Real;
use crate::sdp::{solve, BlockId, LinExpr, MatExpr, Relation, SdpProblem, Sense};

/// Output-resource dimension used by [`coherence_left_sdp`] unless told otherwise.
pub const DEFAULT_OUTPUT_RESOURCE_DIM: usize = 2;

/// Optimal value together with the incoherent operation attaining it.
#[derive(Clone, Debug)]
pub struct ImplementationResult<T: Real> {
    pub value: T,
    /// Choi matrix of `M: R ⊗ A → B` (or `R ⊗ A → S ⊗ B`).
    pub map: Channel<T>,
}

/// Adds an incoherent operation `R ⊗ A → out` and returns `(block, tr_R((ω^T ⊗ I) J_M))`.
fn add_mio_with_resource<T: Real>(
    p: &mut SdpProblem<T>,
    omega: &HermitianOperator<T>,
    da: usize,
    dout: usize,
) -> Result<(BlockId, MatExpr<T>)> {
    let dr = omega.dim();
    let (din, n) = (dr * da, dr * da * dout);
    let jb = p.psd("J_M", n);
    let jm = p.var(jb);
    p.matrix_eq(&jm.partial_trace(&[din, dout], &[0])?, &MatExpr::constant(&ComplexMatrix::identity(din)))?;
    constrain_mio(p, &jm, din, dout);
    let w = omega.matrix().transpose().kron(&ComplexMatrix::identity(da * dout));
    let effective = jm.left_mul(&w)?.partial_trace(&[dr, da * dout], &[1])?;
    Ok((jb, effective))
}

fn check_shapes<T: Real>(q: &SimulationQuery<T>) -> Result<()> {
    if q.resource.dim() == 0 || q.target.dim_in() == 0 {
        return Err(Error::Dimension("empty system".into()));
    }
    Ok(())
}

/// Smallest half diamond-norm error `½‖N − tr_R M(ω ⊗ ·)‖_⋄` over incoherent `M: R ⊗ A → B`.
pub fn implementation_error<T: Real>(q: &SimulationQuery<T>, tol: f64) -> Result<ImplementationResult<T>> {
    check_shapes(q)?;
    let (da, db, dr) = (q.target.dim_in(), q.target.dim_out(), q.resource.dim());
    let mut p = SdpProblem::new(domain_for(&[&q.resource, q.target.choi()]), Sense::Minimize);
    let lam = p.free("lambda");
    p.set_objective(LinExpr::scalar(lam));
    let (jb, j_e) = add_mio_with_resource(&mut p, &q.resource, da, db)?;
    let z = p.psd("Z", da * db);
    let zv = p.var(z);
    let diff = MatExpr::hermitian(q.target.choi()).sub(&j_e)?;
    p.matrix_psd("Z - (J_N - J_E)", &zv.sub(&diff)?)?;
    let lam_i = MatExpr::scaled_identity(&LinExpr::scalar(lam), da);
    p.matrix_psd("lambda I - tr_B Z", &lam_i.sub(&zv.partial_trace(&[da, db], &[0])?)?)?;
    let sol = solve(&p, tol)?;
    let value = sol.optimal_value()?.max(T::zero()).min(T::one());
    let map = Channel::from_choi_unchecked(dr * da, db, sol.block(jb).clone());
    Ok(ImplementationResult { value, map })
}

/// Best gate fidelity `tr(J_U J_E)/d_A²` of a unitary target over incoherent `M: R ⊗ A → B`.
pub fn gate_fidelity<T: Real>(q: &SimulationQuery<T>, tol: f64) -> Result<ImplementationResult<T>> {
    check_shapes(q)?;
    let (da, db, dr) = (q.target.dim_in(), q.target.dim_out(), q.resource.dim());
    let ev = q.target.choi().eigenvalues()?;
    let rank_one = (ev[0] - T::from_count(da)).abs() <= T::tol_floor(1e-8) * T::from_count(da);
    if !rank_one {
        return Err(Error::InvalidParameter("gate fidelity needs a unitary target".into()));
    }
    let mut p = SdpProblem::new(domain_for(&[&q.resource, q.target.choi()]), Sense::Maximize);
    let jb = p.psd("J_M", dr * da * db);
    let jm = p.var(jb);
    p.matrix_eq(&jm.partial_trace(&[dr * da, db], &[0])?, &MatExpr::constant(&ComplexMatrix::identity(dr * da)))?;
    constrain_mio(&mut p, &jm, dr * da, db);
    let c = q.resource.matrix().transpose().kron(q.target.choi().matrix());
    let norm = T::one() / T::from_count(da * da);
    p.set_objective(jm.trace_with(&c)?.scaled(num_complex::Complex::new(norm, T::zero())));
    let sol = solve(&p, tol)?;
    let value = sol.optimal_value()?.max(T::zero()).min(T::one());
    let map = Channel::from_choi_unchecked(dr * da, db, sol.block(jb).clone());
    Ok(ImplementationResult { value, map })
}

/// Upper bound on the robustness left in an output resource of dimension `d_s`:
///
/// `max Σ_{i≠j} σ_ij  s.t.  ½‖σ ⊗ N − M(ω ⊗ ·)‖_⋄ ≤ ε`, `M: R ⊗ A → S ⊗ B` incoherent.
pub fn coherence_left_sdp<T: Real>(q: &SimulationQuery<T>, d_s: usize, tol: f64) -> Result<T> {
    check_shapes(q)?;
    if d_s == 0 {
        return Err(Error::InvalidParameter("output resource dimension must be positive".into()));
    }
    if q.epsilon > T::one() {
        return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1], got {}", q.epsilon)));
    }
    let (da, db) = (q.target.dim_in(), q.target.dim_out());
    let mut p = SdpProblem::new(domain_for(&[&q.resource, q.target.choi()]), Sense::Maximize);
    let sb = p.psd("sigma", d_s);
    let sigma = p.var(sb);
    p.constrain(sigma.trace(), Relation::Eq, T::one());
    let (_, j_e) = add_mio_with_resource(&mut p, &q.resource, da, d_s * db)?;
    let target = sigma
        .kron_right(q.target.choi().matrix())
        .permute_subsystems(&[d_s, da, db], &[1, 0, 2])?;
    let z = p.psd("Z", da * d_s * db);
    let zv = p.var(z);
    p.matrix_psd("Z - (sigma x J_N - J_E)", &zv.sub(&target.sub(&j_e)?)?)?;
    let eps_i = MatExpr::constant(&ComplexMatrix::identity(da).scale_real(q.epsilon));
    p.matrix_psd("eps I - tr_SB Z", &eps_i.sub(&zv.partial_trace(&[da, d_s * db], &[0])?)?)?;
    let ones = ComplexMatrix::from_fn(d_s, d_s, |i, j| {
        num_complex::Complex::new(if i == j { T::zero() } else { T::one() }, T::zero())
    });
    p.set_objective(sigma.trace_with(&ones)?);
    let sol = solve(&p, tol)?;
    Ok(sol.optimal_value()?.max(T::zero()))
}
