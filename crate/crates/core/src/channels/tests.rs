use std::f64::consts::PI;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::PureState;
use crate::random::{random_channel, random_density};

type Ch = Channel<f64>;
type H = HermitianOperator<f64>;

fn close(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>, tol: f64) -> bool {
    (a - b).max_abs() <= tol
}

#[test]
fn identity_choi_is_unnormalized_bell_projector() {
    let j = Ch::identity(2).choi().clone();
    let mut expected = ComplexMatrix::zeros(4, 4);
    for a in [0, 3] {
        for b in [0, 3] {
            expected[(a, b)] = Complex::new(1.0, 0.0);
        }
    }
    assert!(close(j.matrix(), &expected, 1e-15));
}

#[test]
fn rotation_choi_is_rank_one() {
    let ch = Ch::qubit_rotation(PI / 4.0);
    let ev = ch.choi().eigenvalues().unwrap();
    assert!((ev[0] - 2.0).abs() < 1e-12);
    assert!(ev[1..].iter().all(|l| l.abs() < 1e-12));
}

#[test]
fn pauli_z_choi() {
    // |00⟩ − |11⟩ expanded by hand.
    let v = [1.0, 0.0, 0.0, -1.0];
    let expected = ComplexMatrix::from_fn(4, 4, |i, j| Complex::new(v[i] * v[j], 0.0));
    assert!(close(Ch::pauli_z().choi().matrix(), &expected, 1e-15));
}

#[test]
fn constant_and_cq_channels() {
    let zero = H::basis_projector(2, 0);
    let c = Ch::constant(2, &zero).unwrap();
    assert_eq!(c.choi().diagonal(), vec![1.0, 0.0, 1.0, 0.0]);
    let cq = Ch::cq(&[zero.clone(), zero.clone()]).unwrap();
    assert!(close(cq.choi().matrix(), c.choi().matrix(), 1e-15));
    let meas = Ch::cq(&[H::basis_projector(2, 0), H::basis_projector(2, 1)]).unwrap();
    assert_eq!(meas, Ch::dephasing(2));
    let mixed = H::from_real(2, &[0.5, 0.6, 0.6, 0.5]).unwrap();
    assert!(Ch::constant(2, &mixed).is_err());
}

#[test]
fn application_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rho = random_density::<f64, _>(2, &mut rng);
    assert!(close(Ch::identity(2).apply(&rho).unwrap().matrix(), rho.matrix(), 1e-14));
    let sigma = PureState::<f64>::cosdit(2).projector();
    let c = Ch::constant(2, &sigma).unwrap();
    assert!(close(c.apply(&rho).unwrap().matrix(), sigma.matrix(), 1e-14));
    let theta = 0.3f64;
    let out = Ch::qubit_rotation(theta).apply(&H::basis_projector(2, 0)).unwrap();
    assert!((out.get(0, 1).re - theta.cos() * theta.sin()).abs() < 1e-14);
    assert!(Ch::identity(3).apply(&rho).is_err());
}

#[test]
fn mio_predicate() {
    assert!(Ch::dephasing(3).is_mio(1e-12).is_mio);
    assert!(Ch::identity(2).is_mio(1e-12).is_mio);
    let theta = PI / 7.0;
    let r = Ch::qubit_rotation(theta).is_mio(1e-9);
    assert!(!r.is_mio);
    assert!((r.max_violation - theta.cos() * theta.sin()).abs() < 1e-14);
    let diag = H::from_real_diag(&[0.3, 0.7]);
    assert!(Ch::constant(2, &diag).unwrap().is_mio(1e-12).is_mio);
    let plus = PureState::<f64>::cosdit(2).projector();
    assert!(!Ch::constant(2, &plus).unwrap().is_mio(1e-12).is_mio);
}

#[test]
fn composition_and_tensor() {
    let a = Ch::qubit_rotation(0.2);
    let b = Ch::qubit_rotation(0.5);
    let ab = a.then(&b).unwrap();
    assert!(close(ab.choi().matrix(), Ch::qubit_rotation(0.7).choi().matrix(), 1e-14));
    let t = a.tensor(&Ch::identity(2));
    let rho = H::basis_projector(2, 0).kron(&H::basis_projector(2, 1));
    let out = t.apply(&rho).unwrap();
    let expected = a.apply(&H::basis_projector(2, 0)).unwrap().kron(&H::basis_projector(2, 1));
    assert!(close(out.matrix(), expected.matrix(), 1e-14));
}

#[test]
fn json_round_trip_validates() {
    let ch = Ch::qubit_rotation(0.4);
    let back = Ch::from_json(&ch.to_json().unwrap()).unwrap();
    assert!(close(back.choi().matrix(), ch.choi().matrix(), 1e-15));
    let bad = r#"{"dim_in":2,"dim_out":1,"choi":{"dim":2,"re":[[1,0],[0,0.5]],"im":[[0,0],[0,0]]}}"#;
    assert!(Ch::from_json(bad).is_err());
}

#[test]
fn random_channels_are_cptp() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let ch = random_channel::<f64, _>(2, 3, 2, &mut rng).unwrap();
        let (tp, lmin) = ch.cptp_violation().unwrap();
        assert!(tp < 1e-8 && lmin > -1e-8);
    }
}

#[test]
fn cq_choi_commutes_with_input_dephasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let outs: Vec<H> = (0..3).map(|_| random_density(2, &mut rng)).collect();
    let j = Ch::cq(&outs).unwrap().choi().clone();
    let dephase_in = H::basis_projector(3, 1).kron(&H::identity(2));
    let lhs = dephase_in.matrix().matmul(j.matrix());
    let rhs = j.matrix().matmul(dephase_in.matrix());
    assert!(close(&lhs, &rhs, 1e-14));
}

#[test]
fn diamond_distance_examples() {
    let id = Ch::identity(2);
    assert_eq!(diamond_distance(&id, &id, 1e-7).unwrap(), 0.0);
    let dz = diamond_distance(&id, &Ch::pauli_z(), 1e-7).unwrap();
    assert!((dz - 1.0).abs() < 1e-5, "{dz}");

    // Grid lower bound over pure two-qubit inputs cos a|00⟩ + sin a|11⟩.
    let u = Ch::qubit_rotation(PI / 8.0);
    let sdp = diamond_distance(&id, &u, 1e-7).unwrap();
    let w = rotation_matrix(PI / 8.0);
    let mut lb: f64 = 0.0;
    for ia in 0..=2000 {
        let a = ia as f64 / 2000.0 * PI / 2.0;
        // ⟨ψ|(W ⊗ I)|ψ⟩ = cos²a·W₀₀ + sin²a·W₁₁ for this Schmidt family.
        let ov = w[(0, 0)] * a.cos().powi(2) + w[(1, 1)] * a.sin().powi(2);
        lb = lb.max((1.0 - ov.norm_sqr()).max(0.0).sqrt());
    }
    assert!(lb <= sdp + 1e-7 && sdp <= lb + 1e-3, "lb {lb} sdp {sdp}");
    // Numerical-range value for a unitary pair.
    assert!((sdp - (PI / 8.0).sin()).abs() < 1e-6);
}

#[test]
fn diamond_distance_dominates_single_input_distinguishability() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let a = random_channel::<f64, _>(2, 2, 2, &mut rng).unwrap();
        let b = random_channel::<f64, _>(2, 2, 2, &mut rng).unwrap();
        let inputs: Vec<H> = (0..20).map(|_| random_density(2, &mut rng)).collect();
        let lb = trace_distance_lower_bound(&a, &b, &inputs).unwrap();
        let dd = diamond_distance(&a, &b, 1e-7).unwrap();
        assert!(dd >= lb - 1e-6, "{dd} < {lb}");
        let sym = diamond_distance(&b, &a, 1e-7).unwrap();
        assert!((dd - sym).abs() <= 2e-7);
    }
}
