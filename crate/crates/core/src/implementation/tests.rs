use std::f64::consts::PI;

use super::*;
use crate::linalg::PureState;

type Ch = Channel<f64>;

const TOL: f64 = 1e-8;

fn recycling_closed_form(theta: f64) -> f64 {
    let s = (2.0 * theta).sin();
    (1.0 - s) / (1.0 + s)
}

#[test]
fn simulation_cost_examples() {
    assert_eq!(simulation_cost(&Ch::dephasing(2), 0.0, TOL).unwrap(), 0.0);
    for theta in [PI / 30.0, PI / 7.0, PI / 4.0] {
        let c = simulation_cost(&Ch::qubit_rotation(theta), 0.0, TOL).unwrap();
        assert_eq!(c, 1.0, "theta={theta}");
    }
    let u = Ch::qubit_rotation(PI / 4.0);
    assert_eq!(simulation_cost(&u.tensor(&u), 0.0, TOL).unwrap(), 2.0);
}

#[test]
fn amortized_cost_examples() {
    for theta in [PI / 30.0, PI / 7.0, PI / 4.0] {
        let u = Ch::qubit_rotation(theta);
        let a = amortized_cost(&u, 0.0, TOL).unwrap();
        assert!((a - (1.0 + (2.0 * theta).sin()).log2()).abs() < 1e-6);
        assert!(a <= simulation_cost(&u, 0.0, TOL).unwrap() + 1e-9);
    }
    assert_eq!(amortized_cost(&Ch::identity(2), 0.3, TOL).unwrap(), 0.0);
}

#[test]
fn rounding_guard_absorbs_overshoot() {
    assert_eq!(required_rank(1.0 + 1e-7, 1e-7), 2);
    assert_eq!(required_rank(1.0 + 1e-5, 1e-7), 3);
    assert_eq!(required_rank(0.0, 1e-7), 1);
}

#[test]
fn recycling_examples() {
    let r = recycling_from_robustness(1.0, 4, TOL).unwrap();
    assert_eq!(r.cosdit_rank, 2);
    for k in 1..=10 {
        let theta = PI / 4.0 * k as f64 / 10.0;
        let r = recycling_bound(&Ch::qubit_rotation(theta), 2, TOL).unwrap();
        assert!((r.max_robustness_left - recycling_closed_form(theta)).abs() < 1e-6);
    }
    let r = recycling_bound(&Ch::qubit_rotation(PI / 4.0), 2, TOL).unwrap();
    assert!(r.max_robustness_left.abs() < 1e-6);
    assert_eq!(r.cosdit_rank, 1);
    let err = recycling_from_robustness(1.5, 2, TOL).unwrap_err();
    assert_eq!(err, Error::ResourceBelowCost { needed: 3, given: 2 });
}

#[test]
fn recycling_sandwich() {
    for c in [0.01, 0.3, 1.0, 1.7, 3.0] {
        for k in required_rank(c, TOL)..=64 {
            let m = recycling_from_robustness(c, k, TOL).unwrap().cosdit_rank as f64;
            let ratio = k as f64 / m;
            assert!(1.0 + c <= ratio + 1e-12);
            assert!(ratio <= (1.0 + c) * (1.0 + 1.0 / m) + 1e-12);
        }
    }
}

#[test]
fn sequence_examples() {
    let u = Ch::qubit_rotation(PI / 4.0);
    let s = sequence_cost(&[u.clone(), u.clone()], 8, TOL).unwrap();
    assert_eq!(s.final_rank, 2);
    assert_eq!(s.ranks, vec![4, 2]);
    assert!((s.bits - 2.0).abs() < 1e-12);
    let d = Ch::dephasing(2);
    let s = sequence_cost(&[d.clone(), d.clone(), d], 5, TOL).unwrap();
    assert_eq!((s.final_rank, s.bits), (5, 0.0));
    assert!(matches!(sequence_cost(&[u.clone(), u.clone()], 3, TOL), Err(Error::ResourceBelowCost { .. })));
    let single = sequence_cost(&[u.clone()], 6, TOL).unwrap();
    assert_eq!(single.final_rank, recycling_bound(&u, 6, TOL).unwrap().cosdit_rank);
}

#[test]
fn cosbit_implements_rotations_exactly() {
    for theta in [PI / 30.0, PI / 7.0, PI / 4.0] {
        let q = SimulationQuery::cosdit(Ch::qubit_rotation(theta), 2, 0.0).unwrap();
        let e = implementation_error(&q, TOL).unwrap();
        assert!(e.value < 1e-6, "theta={theta}: {}", e.value);
        assert!(e.map.is_mio(1e-6).is_mio);
        let f = gate_fidelity(&q, TOL).unwrap().value;
        assert!((f - 1.0).abs() < 1e-6);
    }
}

#[test]
fn incoherent_resource_cannot_implement_rotation() {
    let u = Ch::qubit_rotation(PI / 7.0);
    let q = SimulationQuery::with_pure(u.clone(), &PureState::basis(2, 0), 0.0).unwrap();
    let e = implementation_error(&q, TOL).unwrap().value;
    assert!(e > 1e-3);
    // With a useless resource the problem is the distance to the closest incoherent operation.
    let q1 = SimulationQuery::cosdit(u, 1, 0.0).unwrap();
    let e1 = implementation_error(&q1, TOL).unwrap().value;
    assert!((e - e1).abs() < 1e-6);
    assert!(gate_fidelity(&q, TOL).unwrap().value < 1.0 - 1e-3);
    let mio = SimulationQuery::with_pure(Ch::dephasing(2), &PureState::basis(2, 0), 0.0).unwrap();
    assert!(implementation_error(&mio, TOL).unwrap().value < 1e-6);
}

#[test]
fn error_decreases_along_cosdit_chain() {
    let u = Ch::qubit_rotation(PI / 5.0);
    let e: Vec<f64> = (1..=3)
        .map(|k| implementation_error(&SimulationQuery::cosdit(u.clone(), k, 0.0).unwrap(), TOL).unwrap().value)
        .collect();
    assert!(e[1] <= e[0] + 1e-7 && e[2] <= e[1] + 1e-7);
    assert!(e[2] < 1e-6);
}

#[test]
fn gate_fidelity_rejects_non_unitary() {
    let q = SimulationQuery::cosdit(Ch::dephasing(2), 2, 0.0).unwrap();
    assert!(gate_fidelity(&q, TOL).is_err());
}

#[test]
fn coherence_left_examples() {
    let q = SimulationQuery::cosdit(Ch::qubit_rotation(PI / 8.0), 2, 1.0).unwrap();
    assert!((coherence_left_sdp(&q, 2, TOL).unwrap() - 1.0).abs() < 1e-6);
    let q = SimulationQuery::cosdit(Ch::qubit_rotation(PI / 4.0), 2, 1e-4).unwrap();
    assert!(coherence_left_sdp(&q, 2, TOL).unwrap() <= 1e-3);
    let q = SimulationQuery::cosdit(Ch::qubit_rotation(PI / 8.0), 2, 1e-4).unwrap();
    let v = coherence_left_sdp(&q, 2, TOL).unwrap();
    assert!((v - recycling_closed_form(PI / 8.0)).abs() < 5e-3, "{v}");
}

#[test]
fn coherence_left_grows_with_epsilon() {
    let mut prev = -1.0;
    for eps in [1e-4, 0.05, 0.15, 0.3] {
        let q = SimulationQuery::cosdit(Ch::qubit_rotation(PI / 10.0), 2, eps).unwrap();
        let v = coherence_left_sdp(&q, 2, TOL).unwrap();
        assert!(v >= prev - 1e-7);
        prev = v;
    }
}

#[test]
fn cost_report() {
    let r = CostReport::new(&Ch::qubit_rotation(PI / 4.0), 0.0, Some(8), TOL).unwrap();
    assert_eq!((r.input_rank, r.output_rank), (8, 4));
    assert_eq!(r.sim_cost_bits, 1.0);
    assert!((r.amortized_cost_bits - 1.0).abs() < 1e-6);
    assert!((r.coherence_left_bound - 3.0).abs() < 1e-6);
}
