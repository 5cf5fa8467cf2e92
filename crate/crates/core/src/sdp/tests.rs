use num_complex::Complex;

use super::*;
use crate::linalg::{ComplexMatrix, PureState};

type P = SdpProblem<f64>;

/// min λ s.t. λI ⪰ H
fn max_eig_problem(h: &HermitianOperator<f64>) -> P {
    let mut p = P::new(Domain::Complex, Sense::Minimize);
    let lam = p.free("lambda");
    p.set_objective(LinExpr::scalar(lam));
    let lhs = MatExpr::scaled_identity(&LinExpr::scalar(lam), h.dim());
    p.matrix_psd("slack", &lhs.sub(&MatExpr::hermitian(h)).unwrap()).unwrap();
    p
}

/// max tr(ρS) s.t. S ⪰ 0, S_jj = 1
fn dual_robustness_problem(rho: &HermitianOperator<f64>) -> P {
    let mut p = P::new(Domain::Complex, Sense::Maximize);
    let s = p.psd("S", rho.dim());
    let sv = p.var(s);
    p.set_objective(sv.trace_with(rho.matrix()).unwrap());
    for j in 0..rho.dim() {
        p.constrain(sv.entry(j, j).clone(), Relation::Eq, 1.0);
    }
    p
}

fn pauli_y() -> HermitianOperator<f64> {
    let z = Complex::new(0.0, 0.0);
    HermitianOperator::new(
        ComplexMatrix::new(2, 2, vec![z, Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), z]).unwrap(),
    )
    .unwrap()
}

#[test]
fn max_eigenvalue_of_diagonal() {
    let sol = solve(&max_eig_problem(&HermitianOperator::from_real_diag(&[3.0, 1.0])), 1e-7).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.primal_value - 3.0).abs() < 1e-6, "{}", sol.primal_value);
    assert!(sol.gap < 1e-6);
}

#[test]
fn cosbit_dual_robustness_is_two() {
    let rho = PureState::<f64>::cosdit(2).projector();
    let sol = solve(&dual_robustness_problem(&rho), 1e-7).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.primal_value - 2.0).abs() < 1e-6);
    let emb = solve(&embed_complex(&dual_robustness_problem(&rho)), 1e-7).unwrap();
    assert!((emb.primal_value - sol.primal_value).abs() < 1e-6);
}

#[test]
fn negative_trace_is_infeasible() {
    let mut p = P::new(Domain::Complex, Sense::Minimize);
    let x = p.psd("X", 2);
    let tr = p.var(x).trace();
    p.constrain(tr, Relation::Eq, -1.0);
    let sol = solve(&p, 1e-7).unwrap();
    assert_eq!(sol.status, SdpStatus::Infeasible);
    let cert = sol.certificate.clone().unwrap();
    assert_eq!(cert.kind, CertificateKind::PrimalInfeasible);
    // y·tr(X) = -y with y < 0 certifies: Aᵀy = y·I ⪯ 0 and bᵀy = -y > 0.
    assert!(cert.ray[0] < 0.0);
    assert!(sol.optimal_value().is_err());
}

#[test]
fn pauli_y_needs_complex_entries() {
    let p = max_eig_problem(&pauli_y());
    let sol = solve(&p, 1e-7).unwrap();
    assert!((sol.primal_value - 1.0).abs() < 1e-6);
    let emb = solve(&embed_complex(&p), 1e-7).unwrap();
    assert!((emb.primal_value - 1.0).abs() < 1e-6);
    // The slack block recovers λI − Y, which has the imaginary off-diagonal.
    let slack = sol.block_by_label("slack").unwrap();
    assert!((slack.get(0, 1).im - 1.0).abs() < 1e-5);
}

#[test]
fn real_problem_embedding_is_equivalent() {
    let h = HermitianOperator::from_real(3, &[1.0, 0.5, 0.0, 0.5, 2.0, 0.3, 0.0, 0.3, -1.0]).unwrap();
    let mut p = max_eig_problem(&h);
    p.domain = Domain::Real;
    let a = solve(&p, 1e-7).unwrap();
    let b = solve(&embed_complex(&p), 1e-7).unwrap();
    let lmax = h.eigenvalues().unwrap()[0];
    assert!((a.primal_value - lmax).abs() < 1e-6);
    assert!((b.primal_value - lmax).abs() < 1e-6);
}

#[test]
fn inequalities_and_nonneg_scalars() {
    // max t + tr X  s.t. t ≤ 2, tr X ≤ 1, X_01 ≥ 0.2, t ≥ 0
    let mut p = P::new(Domain::Complex, Sense::Maximize);
    let t = p.nonneg("t");
    let x = p.psd("X", 2);
    let xv = p.var(x);
    p.set_objective(LinExpr::scalar(t).plus(&xv.trace()));
    p.constrain(LinExpr::scalar(t), Relation::Le, 2.0);
    p.constrain(xv.trace(), Relation::Le, 1.0);
    p.constrain(xv.entry(0, 1).clone(), Relation::Ge, 0.2);
    let sol = solve(&p, 1e-7).unwrap();
    assert!((sol.primal_value - 3.0).abs() < 1e-6);
    assert!((sol.scalar(t) - 2.0).abs() < 1e-5);
    assert!(sol.block(x).get(0, 1).re >= 0.2 - 1e-6);
}

#[test]
fn redundant_equalities_are_tolerated() {
    let rho = PureState::<f64>::cosdit(3).projector();
    let mut p = dual_robustness_problem(&rho);
    let c = p.constraints[0].clone();
    p.constraints.push(c.clone());
    p.constraints.push(Constraint { expr: c.expr.scaled(Complex::new(2.0, 0.0)), relation: Relation::Eq, target: 2.0 });
    let sol = solve(&p, 1e-7).unwrap();
    assert!((sol.primal_value - 3.0).abs() < 1e-6);
    // Inconsistent duplicate.
    p.constraints.push(Constraint { expr: c.expr, relation: Relation::Eq, target: 1.5 });
    assert_eq!(solve(&p, 1e-7).unwrap().status, SdpStatus::Infeasible);
}

#[test]
fn unbounded_problem_is_flagged() {
    let mut p = P::new(Domain::Real, Sense::Maximize);
    let x = p.psd("X", 2);
    let xv = p.var(x);
    p.set_objective(xv.entry(0, 0).clone());
    p.constrain(xv.entry(1, 1).clone(), Relation::Eq, 1.0);
    let sol = solve(&p, 1e-7).unwrap();
    assert_eq!(sol.status, SdpStatus::Unbounded);
}

#[test]
fn json_round_trip() {
    let p = dual_robustness_problem(&PureState::<f64>::cosdit(2).projector());
    let s = p.to_json().unwrap();
    let back = P::from_json(&s).unwrap();
    assert_eq!(back, p);
    let bad = s.replace("\"dim\": 2", "\"dim\": 1");
    assert!(P::from_json(&bad).is_err());
}

#[test]
fn rejects_bad_tolerance() {
    let p = dual_robustness_problem(&PureState::<f64>::cosdit(2).projector());
    assert!(solve(&p, 0.5).is_err());
    assert!(solve(&p, 1e-13).is_err());
}

#[test]
fn single_precision_front_end() {
    let rho = PureState::<f32>::cosdit(2).projector();
    let mut p = SdpProblem::<f32>::new(Domain::Complex, Sense::Maximize);
    let s = p.psd("S", 2);
    let sv = p.var(s);
    p.set_objective(sv.trace_with(rho.matrix()).unwrap());
    for j in 0..2 {
        p.constrain(sv.entry(j, j).clone(), Relation::Eq, 1.0);
    }
    let sol = solve(&p, 1e-6).unwrap();
    assert!((sol.primal_value - 2.0).abs() < 1e-4);
}
