use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::PureState;
use crate::random::{haar_pure_state, random_channel, random_density};

type Ch = Channel<f64>;
type H = HermitianOperator<f64>;

const TOL: f64 = 1e-8;

fn cosdit(d: usize) -> H {
    PureState::<f64>::cosdit(d).projector()
}

fn flagpole(p: f64, d: usize) -> PureState<f64> {
    let mut probs = vec![(1.0 - p) / (d - 1) as f64; d];
    probs[0] = p;
    PureState::from_probabilities(&probs).unwrap()
}

#[test]
fn diagonal_states_are_free() {
    let rho = H::from_real_diag(&[0.3, 0.7]);
    assert_eq!(state_robustness(&rho, TOL).unwrap(), 0.0);
    assert_eq!(state_robustness_dual(&H::maximally_mixed(4), TOL).unwrap(), 0.0);
}

#[test]
fn cosdit_robustness_is_d_minus_one() {
    for d in 2..=4 {
        let rho = cosdit(d);
        let want = (d - 1) as f64;
        assert!((state_robustness(&rho, TOL).unwrap() - want).abs() < 1e-6, "d={d}");
        assert!((state_robustness_dual(&rho, TOL).unwrap() - want).abs() < 1e-6, "d={d}");
    }
}

#[test]
fn flagpole_two_thirds() {
    let psi = flagpole(2.0 / 3.0, 3);
    let c = state_robustness(&psi.projector(), TOL).unwrap();
    assert!((c - 5.0 / 3.0).abs() < 1e-6);
    assert!((pure_state_robustness(&psi) - 5.0 / 3.0).abs() < 1e-12);
    let probs: [f64; 3] = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
    let h: f64 = -probs.iter().map(|p| p * p.log2()).sum::<f64>();
    assert!((relative_entropy_coherence(&psi.projector()).unwrap() - h).abs() < 1e-9);
}

#[test]
fn scalar_measures_of_cosbit() {
    let rho = cosdit(2);
    assert!((l1_coherence(&rho) - 1.0).abs() < 1e-12);
    assert!((relative_entropy_coherence(&rho).unwrap() - 1.0).abs() < 1e-9);
    let psi = PureState::<f64>::cosdit(2);
    assert_eq!(coherence_rank(&psi), 2);
    assert!((lambda1_pure(&psi) - 0.5).abs() < 1e-12);
    let zero = PureState::<f64>::basis(3, 0);
    assert_eq!(coherence_rank(&zero), 1);
    assert_eq!(lambda1_pure(&zero), 1.0);
}

#[test]
fn pure_states_match_amplitude_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [2, 3, 4] {
        for _ in 0..4 {
            let psi = haar_pure_state::<f64, _>(d, &mut rng);
            let want = pure_state_robustness(&psi);
            let rho = psi.projector();
            assert!((state_robustness(&rho, TOL).unwrap() - want).abs() < 1e-6);
            assert!((state_robustness_dual(&rho, TOL).unwrap() - want).abs() < 1e-6);
        }
    }
}

#[test]
fn qubit_robustness_is_twice_coherence() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let rho = random_density::<f64, _>(2, &mut rng);
        let want = 2.0 * rho.get(0, 1).norm();
        assert!((state_robustness(&rho, TOL).unwrap() - want).abs() < 1e-6);
    }
}

#[test]
fn report_is_consistent() {
    let r = CoherenceReport::of_state(&flagpole(0.5, 3).projector(), TOL).unwrap();
    assert_eq!(r.rank, Some(3));
    assert!((r.c_lr - (1.0 + r.c_r).log2()).abs() < 1e-12);
    assert!(r.diagnostics.robustness_gap < 2e-7);
    assert!(r.c_l1 / 2.0 <= r.c_r + 1e-7 && r.c_r <= r.c_l1 + 1e-7);
    let mixed = CoherenceReport::of_state(&random_density::<f64, _>(3, &mut ChaCha8Rng::seed_from_u64(1)), TOL).unwrap();
    assert_eq!(mixed.rank, None);
    let json = serde_json::to_string(&r).unwrap();
    let back: CoherenceReport<f64> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn rotation_robustness_all_routes() {
    for k in 1..=6 {
        let theta = PI / 4.0 * k as f64 / 6.0;
        let u = Ch::qubit_rotation(theta);
        let want = (2.0 * theta).sin();
        assert!((channel_robustness(&u, TOL).unwrap() - want).abs() < 1e-6);
        assert!((channel_robustness_primal(&u, TOL).unwrap() - want).abs() < 1e-6);
        assert!((channel_robustness_dual_sdp(&u, TOL).unwrap() - want).abs() < 1e-6);
        assert!((cohering_power(&u, TOL).unwrap() - (1.0 + want).log2()).abs() < 1e-6);
    }
}

#[test]
fn mio_channels_have_zero_robustness() {
    for ch in [Ch::dephasing(3), Ch::identity(2), Ch::pauli_z()] {
        assert_eq!(channel_robustness(&ch, TOL).unwrap(), 0.0);
        assert_eq!(channel_robustness_primal(&ch, TOL).unwrap(), 0.0);
        assert_eq!(smoothed_channel_robustness(&ch, 0.2, TOL).unwrap(), 0.0);
    }
}

#[test]
fn constant_channel_inherits_state_robustness() {
    let sigma = flagpole(0.6, 3).projector();
    let ch = Ch::constant(2, &sigma).unwrap();
    let want = state_robustness(&sigma, TOL).unwrap();
    assert!((channel_robustness(&ch, TOL).unwrap() - want).abs() < 1e-6);
    assert!((channel_robustness_primal(&ch, TOL).unwrap() - want).abs() < 1e-6);
}

#[test]
fn tensor_product_is_multiplicative() {
    let u = Ch::qubit_rotation(PI / 4.0);
    let uu = u.tensor(&u);
    assert!((channel_robustness_primal(&uu, TOL).unwrap() - 3.0).abs() < 1e-6);
    assert!((cohering_power(&uu, TOL).unwrap() - 2.0).abs() < 1e-6);
    let v = Ch::qubit_rotation(PI / 10.0);
    let uv = u.tensor(&v);
    let want = 2.0 * (1.0 + (PI / 5.0).sin()) - 1.0;
    assert!((channel_robustness_primal(&uv, TOL).unwrap() - want).abs() < 1e-6);
}

#[test]
fn random_channels_agree_across_routes() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let ch = random_channel::<f64, _>(2, 2, 2, &mut rng).unwrap();
        let a = channel_robustness(&ch, TOL).unwrap();
        let b = channel_robustness_primal(&ch, TOL).unwrap();
        let c = channel_robustness_dual_sdp(&ch, TOL).unwrap();
        assert!((a - b).abs() < 1e-6 && (b - c).abs() < 1e-6, "{a} {b} {c}");
    }
}

#[test]
fn sampled_cohering_power_is_a_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let u = Ch::qubit_rotation(PI / 7.0);
    let exact = cohering_power(&u, TOL).unwrap();
    let sampled = sampled_cohering_power(&u, 40, &mut rng, TOL).unwrap();
    assert!(sampled <= exact + 1e-7);
    assert!(sampled >= exact - 1e-6, "basis inputs attain the maximum");
}

#[test]
fn cq_values() {
    let zero = H::basis_projector(2, 0);
    assert_eq!(cq_asymptotic_values(&[zero.clone(), H::basis_projector(2, 1)]).unwrap(), 0.0);
    let v = cq_asymptotic_values(&[zero, cosdit(2)]).unwrap();
    assert!((v - 1.0).abs() < 1e-9);
    let v = cq_asymptotic_values(&[cosdit(3), H::basis_projector(3, 0)]).unwrap();
    assert!((v - 3f64.log2()).abs() < 1e-9);
}

#[test]
fn smoothed_robustness_at_zero() {
    let u = Ch::qubit_rotation(PI / 4.0);
    assert!((smoothed_channel_robustness(&u, 0.0, TOL).unwrap() - 1.0).abs() < 1e-6);
    assert!((smoothed_channel_robustness_dual(&u, 0.0, TOL).unwrap() - 1.0).abs() < 1e-6);
    assert!(smoothed_channel_robustness(&u, 1.0, TOL).is_err());
}

#[test]
fn smoothed_primal_matches_dual_and_decreases() {
    let u = Ch::qubit_rotation(PI / 14.0);
    let mut prev = f64::INFINITY;
    for eps in [0.0, 0.05, 0.1, 0.3, 0.5] {
        let p = smoothed_channel_robustness(&u, eps, TOL).unwrap();
        let d = smoothed_channel_robustness_dual(&u, eps, TOL).unwrap();
        assert!((p - d).abs() < 2e-7, "eps={eps}: {p} vs {d}");
        assert!(p <= prev + 1e-7);
        prev = p;
    }
    assert!(prev < 1e-6);
}

#[test]
fn small_epsilon_is_continuous() {
    let u = Ch::qubit_rotation(PI / 8.0);
    let c0 = smoothed_channel_robustness(&u, 0.0, TOL).unwrap();
    let c1 = smoothed_channel_robustness(&u, 1e-6, TOL).unwrap();
    assert!(c1 <= c0 + 1e-7 && c0 - c1 < 1e-4);
}

#[test]
fn dmax_identity() {
    let u = Ch::qubit_rotation(PI / 6.0);
    let (c_lr, m) = log_robustness_via_dmax(&u, TOL).unwrap();
    assert!(m.is_mio(1e-7).is_mio);
    assert!((c_lr - (1.0 + (PI / 3.0).sin()).log2()).abs() < 1e-6);
    assert!((dmax(&u, &m, TOL).unwrap() - c_lr).abs() < 1e-6);
    assert!(dmax(&u, &Ch::dephasing(2), TOL).unwrap().is_infinite());
    assert!(dmax(&u, &u, TOL).unwrap().abs() < 1e-6);
}
