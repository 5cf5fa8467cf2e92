//! Dense semidefinite programming: a modelling layer over Hermitian PSD
//! blocks and a homogeneous self-dual interior-point solver.
//!
//! ```
//! use miocoh::sdp::{solve, Domain, LinExpr, MatExpr, SdpProblem, Sense};
//! use miocoh::linalg::HermitianOperator;
//!
//! // min λ  s.t.  λ·I ⪰ diag(3, 1)
//! let mut p = SdpProblem::<f64>::new(Domain::Real, Sense::Minimize);
//! let lam = p.free("lambda");
//! p.set_objective(LinExpr::scalar(lam));
//! let lhs = MatExpr::scaled_identity(&LinExpr::scalar(lam), 2);
//! let rhs = MatExpr::hermitian(&HermitianOperator::from_real_diag(&[3.0, 1.0]));
//! p.matrix_psd("slack", &lhs.sub(&rhs).unwrap()).unwrap();
//! let sol = solve(&p, 1e-7).unwrap();
//! assert!((sol.primal_value - 3.0).abs() < 1e-6);
//! ```

mod ipm;
mod model;
mod standard;

use serde::{Deserialize, Serialize};

pub use model::{
    BlockId, BlockSpec, Constraint, Domain, LinExpr, MatExpr, Relation, ScalarId, ScalarKind, ScalarSpec,
    SdpProblem, Sense, Var,
};

use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::scalar::Real;
use ipm::IpmStatus;

/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    /// Multipliers `y` over the constraints with `Σ y_i A_i ⪯ 0` (on every
    /// variable cone) and `Σ y_i b_i > 0`.
    PrimalInfeasible,
    /// An improving ray of the primal with zero constraint image.
    DualInfeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Certificate<T: Real> {
    pub kind: CertificateKind,
    /// Per-constraint multipliers (primal infeasibility) or empty.
    pub ray: Vec<T>,
    /// Relative residual of the certificate.
    pub residual: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution<T: Real> {
    pub status: SdpStatus,
    pub primal_value: T,
    pub dual_value: T,
    /// `|primal_value − dual_value|`.
    pub gap: T,
    pub blocks: Vec<(String, HermitianOperator<T>)>,
    pub scalars: Vec<(String, T)>,
    /// Dual multiplier of each constraint, signed so that the dual value is
    /// `Σ multiplier_i · target_i` plus the objective offset.
    pub multipliers: Vec<T>,
    pub primal_residual: T,
    pub dual_residual: T,
    pub iterations: usize,
    pub certificate: Option<Certificate<T>>,
}

impl<T: Real> SdpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }

    pub fn block(&self, id: BlockId) -> &HermitianOperator<T> {
        &self.blocks[id.0].1
    }

    pub fn block_by_label(&self, label: &str) -> Option<&HermitianOperator<T>> {
        self.blocks.iter().find(|(l, _)| l == label).map(|(_, b)| b)
    }

    pub fn scalar(&self, id: ScalarId) -> T {
        self.scalars[id.0].1
    }

    /// Primal value when optimal, an error describing the status otherwise.
    pub fn optimal_value(&self) -> Result<T> {
        match self.status {
            SdpStatus::Optimal => Ok(self.primal_value),
            SdpStatus::Infeasible => Err(Error::Infeasible("primal infeasible".into())),
            SdpStatus::Unbounded => Err(Error::Solver("dual infeasible (primal unbounded)".into())),
            SdpStatus::NumericFailure => Err(Error::Solver(format!(
                "no convergence after {} iterations (primal residual {:.2e}, dual residual {:.2e}, gap {:.2e})",
                self.iterations, self.primal_residual.to_f64_lossy(), self.dual_residual.to_f64_lossy(), self.gap.to_f64_lossy()
            ))),
        }
    }
}

pub fn solve<T: Real>(p: &SdpProblem<T>, tol: f64) -> Result<SdpSolution<T>> {
    solve_with(p, &SolverOptions::with_tol(tol))
}

pub fn solve_with<T: Real>(p: &SdpProblem<T>, opts: &SolverOptions) -> Result<SdpSolution<T>> {
    if !(opts.tol > 1e-12 && opts.tol < 1e-2) {
        return Err(Error::InvalidParameter(format!("solver tolerance {} outside (1e-12, 1e-2)", opts.tol)));
    }
    p.validate()?;
    let compiled = standard::compile(p);
    let n_cons = p.constraints.len();
    let lit = T::lit;

    if let Some(&i) = compiled.trivially_violated.first() {
        let mut ray = vec![T::zero(); n_cons];
        ray[i] = T::one();
        return Ok(SdpSolution {
            status: SdpStatus::Infeasible,
            primal_value: T::nan(),
            dual_value: T::nan(),
            gap: T::nan(),
            blocks: p.blocks.iter().map(|b| (b.label.clone(), HermitianOperator::zeros(b.dim))).collect(),
            scalars: p.scalars.iter().map(|s| (s.label.clone(), T::zero())).collect(),
            multipliers: vec![T::zero(); n_cons],
            primal_residual: T::nan(),
            dual_residual: T::nan(),
            iterations: 0,
            certificate: Some(Certificate { kind: CertificateKind::PrimalInfeasible, ray, residual: T::zero() }),
        });
    }

    let r = ipm::solve_standard(&compiled.form, opts.tol, opts.max_iter);
    let status = match r.status {
        IpmStatus::Optimal => SdpStatus::Optimal,
        IpmStatus::PrimalInfeasible => SdpStatus::Infeasible,
        IpmStatus::DualInfeasible => SdpStatus::Unbounded,
        IpmStatus::NumericFailure => SdpStatus::NumericFailure,
    };
    let sign = compiled.sign;
    let per_constraint: Vec<T> = compiled
        .row_of
        .iter()
        .map(|row| row.map_or(T::zero(), |i| lit(sign * r.y[i])))
        .collect();
    let certificate = match status {
        SdpStatus::Infeasible => Some(Certificate {
            kind: CertificateKind::PrimalInfeasible,
            ray: compiled.row_of.iter().map(|row| row.map_or(T::zero(), |i| lit(r.y[i]))).collect(),
            residual: lit(r.certificate_residual),
        }),
        SdpStatus::Unbounded => Some(Certificate {
            kind: CertificateKind::DualInfeasible,
            ray: Vec::new(),
            residual: lit(r.certificate_residual),
        }),
        _ => None,
    };
    let blocks = compiled.recover_blocks::<T>(&r.xs);
    let primal = sign * r.pobj + compiled.offset;
    let dual = sign * r.dobj + compiled.offset;
    Ok(SdpSolution {
        status,
        primal_value: lit(primal),
        dual_value: lit(dual),
        gap: lit((primal - dual).abs()),
        blocks: p.blocks.iter().map(|b| b.label.clone()).zip(blocks).collect(),
        scalars: p.scalars.iter().map(|s| s.label.clone()).zip(compiled.recover_scalars::<T>(&r.xl, &r.f)).collect(),
        multipliers: if status == SdpStatus::Optimal { per_constraint } else { vec![T::zero(); n_cons] },
        primal_residual: lit(r.pres),
        dual_residual: lit(r.dres),
        iterations: r.iterations,
        certificate,
    })
}

/// Rewrites a Hermitian problem over real symmetric blocks of twice the size,
/// `X ↦ [[Re X, −Im X], [Im X, Re X]]`, reading `Re X = ½(Y₁₁ + Y₂₂)` and
/// `Im X = ½(Y₂₁ − Y₁₂)`. The optimal values of the two problems agree.
pub fn embed_complex<T: Real>(p: &SdpProblem<T>) -> SdpProblem<T> {
    let dims: Vec<usize> = p.blocks.iter().map(|b| b.dim).collect();
    let half = T::lit(0.5);
    let rewrite = |e: &LinExpr<T>| -> LinExpr<T> {
        let mut out = LinExpr::constant(e.constant);
        for &(v, z) in &e.terms {
            match v {
                Var::Scalar(_) => out.add_term(v, num_complex::Complex::new(z.re, T::zero())),
                Var::Entry { block, row, col } => {
                    let n = dims[block];
                    let ent = |r: usize, c: usize, w: T| {
                        (Var::Entry { block, row: r, col: c }, num_complex::Complex::new(w * half, T::zero()))
                    };
                    // Re(z·X_rc) = Re z·Re X_rc − Im z·Im X_rc, with Im X_rc = ½(Y_{n+r,c} − Y_{r,n+c}).
                    let (a, b) = (z.re, z.im);
                    out.terms.push(ent(row, col, a));
                    out.terms.push(ent(n + row, n + col, a));
                    if row != col {
                        out.terms.push(ent(n + row, col, -b));
                        out.terms.push(ent(row, n + col, b));
                    }
                }
            }
        }
        out.simplified()
    };
    SdpProblem {
        domain: Domain::Real,
        sense: p.sense,
        blocks: p.blocks.iter().map(|b| BlockSpec { label: b.label.clone(), dim: 2 * b.dim }).collect(),
        scalars: p.scalars.clone(),
        objective: rewrite(&p.objective),
        constraints: p
            .constraints
            .iter()
            .map(|c| Constraint { expr: rewrite(&c.expr), relation: c.relation, target: c.target })
            .collect(),
    }
}

#[cfg(test)]
mod tests;
