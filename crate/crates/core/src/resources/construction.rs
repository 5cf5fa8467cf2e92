use num_complex::Complex;

use super::{flagpole_partner, projector_complement, FlagpoleSpec};
use crate::channels::{domain_for, Channel};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::scalar::Real;
use crate::sdp::{solve, LinExpr, MatExpr, Relation, SdpProblem, Sense};

/// Largest total incoherence violation accepted as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Incoherent operation `M: R ⊗ A → B` with `M(φ_p ⊗ ρ) = N(ρ)`.
#[derive(Clone, Debug)]
pub struct FlagpoleSimulation<T: Real> {
    pub mio: Channel<T>,
    pub l1: Channel<T>,
    pub l2: Channel<T>,
    /// Largest entry of `J_{tr_R M(φ_p ⊗ ·)} − J_N`.
    pub residual: T,
    /// Largest incoherence-preservation violation of `M`.
    pub mio_violation: T,
}

/// Finds a channel `L` minimizing the total violation (sum of absolute real and
/// imaginary parts) of the incoherence functionals of `fixed + w·J_L`.
fn complete_to_mio<T: Real>(fixed: &HermitianOperator<T>, w: T, din: usize, dout: usize, tol: f64) -> Result<(HermitianOperator<T>, T)> {
    let mut p = SdpProblem::new(domain_for(&[fixed]), Sense::Minimize);
    let lb = p.psd("J_L", din * dout);
    let lv = p.var(lb);
    p.matrix_eq(&lv.partial_trace(&[din, dout], &[0])?, &MatExpr::constant(&ComplexMatrix::identity(din)))?;
    let mix = MatExpr::hermitian(fixed).add(&lv.scale_real(w))?;
    let complex = p.domain == crate::sdp::Domain::Complex;
    let mut obj = LinExpr::zero();
    for i in 0..din {
        for a in 0..dout {
            for b in a + 1..dout {
                let e = mix.entry(i * dout + a, i * dout + b).clone();
                let mut parts = vec![e.clone()];
                if complex {
                    parts.push(e.scaled(Complex::new(T::zero(), -T::one())));
                }
                for part in parts {
                    let t = LinExpr::scalar(p.nonneg(format!("t{i}{a}{b}")));
                    p.constrain(part.minus(&t), Relation::Le, T::zero());
                    p.constrain(part.plus(&t), Relation::Ge, T::zero());
                    obj = obj.plus(&t);
                }
            }
        }
    }
    p.set_objective(obj);
    let sol = solve(&p, tol)?;
    Ok((sol.block(lb).clone(), sol.optimal_value()?.max(T::zero())))
}

/// Builds the three-projector incoherent simulation of `n` with a flagpole resource.
///
/// Fails with [`Error::Infeasible`] when no channel completes either mixture to an
/// incoherent one.
pub fn construct_flagpole_simulation<T: Real>(n: &Channel<T>, spec: &FlagpoleSpec<T>, tol: f64) -> Result<FlagpoleSimulation<T>> {
    let (da, db, d) = (n.dim_in(), n.dim_out(), spec.d);
    if d <= db {
        return Err(Error::InvalidParameter(format!("flagpole dimension {d} must exceed output dimension {db}")));
    }
    let p = spec.p;
    let dm1 = T::from_count(d - 1);
    let j_n = n.choi();
    let (j_l1, j_l2) = if n.is_mio(T::zero()).is_mio {
        (j_n.clone(), j_n.clone())
    } else {
        let (j1, v1) = complete_to_mio(&j_n.scale(p), T::one() - p, da, db, tol)?;
        if v1 > T::lit(FEASIBILITY_TOL) {
            return Err(Error::Infeasible(format!("no channel completes the first mixture (violation {v1:.3e})")));
        }
        let fixed = &j_n.scale((T::one() - p) / dm1) + &j1.scale(p / dm1);
        let (j2, v2) = complete_to_mio(&fixed, T::one() - T::one() / dm1, da, db, tol)?;
        if v2 > T::lit(FEASIBILITY_TOL) {
            return Err(Error::Infeasible(format!("no channel completes the second mixture (violation {v2:.3e})")));
        }
        (j1, j2)
    };
    let phi_p = spec.state().projector();
    let phi = flagpole_partner(spec).projector();
    let pi = projector_complement(d, &[&phi_p, &phi]);
    let j_m = &(&phi_p.transpose().kron(j_n) + &phi.transpose().kron(&j_l1)) + &pi.transpose().kron(&j_l2);
    let mio = Channel::from_choi_unchecked(d * da, db, j_m);
    let w = phi_p.matrix().transpose().kron(&ComplexMatrix::identity(da * db));
    let effective = w.matmul(mio.choi().matrix()).partial_trace(&[d, da * db], &[1])?;
    let residual = (&effective - j_n.matrix()).max_abs();
    let mio_violation = mio.mio_violation();
    Ok(FlagpoleSimulation {
        l1: Channel::from_choi_unchecked(da, db, j_l1),
        l2: Channel::from_choi_unchecked(da, db, j_l2),
        mio,
        residual,
        mio_violation,
    })
}

/// Largest flagpole weight (to within `resolution`) for which the construction succeeds.
pub fn flagpole_feasibility_boundary<T: Real>(n: &Channel<T>, d: usize, resolution: T, tol: f64) -> Result<T> {
    let feasible = |p: T| -> Result<bool> {
        match construct_flagpole_simulation(n, &FlagpoleSpec::new(d, p)?, tol) {
            Ok(_) => Ok(true),
            Err(Error::Infeasible(_)) => Ok(false),
            Err(e) => Err(e),
        }
    };
    let (mut lo, mut hi) = (T::one() / T::from_count(d), T::one());
    if feasible(hi)? {
        return Ok(hi);
    }
    if !feasible(lo)? {
        return Err(Error::Infeasible(format!("no flagpole of dimension {d} works")));
    }
    while hi - lo > resolution {
        let mid = (lo + hi) * T::lit(0.5);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
