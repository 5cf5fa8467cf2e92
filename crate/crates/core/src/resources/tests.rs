use std::f64::consts::PI;

use super::*;
use crate::measures::state_robustness;

type Ch = Channel<f64>;

const TOL: f64 = 1e-8;

fn flag(d: usize, p: f64) -> PureState<f64> {
    FlagpoleSpec::new(d, p).unwrap().state()
}

fn amplitudes(psi: &PureState<f64>) -> Vec<f64> {
    psi.amplitudes().iter().map(|z| z.re).collect()
}

#[test]
fn flagpole_examples() {
    let c = flag(4, 0.25);
    assert!(amplitudes(&c).iter().all(|a| (a - 0.5).abs() < 1e-12));
    let f = amplitudes(&flag(3, 2.0 / 3.0));
    let want = [(2.0f64 / 3.0).sqrt(), (1.0f64 / 6.0).sqrt(), (1.0f64 / 6.0).sqrt()];
    assert!(f.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12));
    assert_eq!(amplitudes(&flag(3, 1.0)), vec![1.0, 0.0, 0.0]);
    assert!(FlagpoleSpec::new(3, 0.2).is_err());
    assert!(FlagpoleSpec::new(1, 1.0).is_err());
    assert!(FlagpoleSpec::new(3, 1.1).is_err());
}

#[test]
fn partner_is_orthogonal() {
    for p in [0.34, 0.5, 0.9] {
        let spec = FlagpoleSpec::new(4, p).unwrap();
        assert!(spec.state().overlap(&flagpole_partner(&spec)).norm() < 1e-12);
    }
}

#[test]
fn robustness_decreases_along_flagpoles() {
    let mut prev = f64::INFINITY;
    for i in 0..=10 {
        let p = 1.0 / 3.0 + (2.0 / 3.0) * i as f64 / 10.0;
        let c = state_robustness(&flag(3, p).projector(), TOL).unwrap();
        assert!(c <= prev + 1e-7);
        prev = c;
    }
}

#[test]
fn lemma1_examples() {
    let cosbit = PureState::<f64>::cosdit(2);
    let f = flag(3, 2.0 / 3.0);
    assert_eq!(lemma1_check(&cosbit, &f).possible, Possibility::Undetermined);
    let v = lemma1_check(&f, &cosbit);
    assert_eq!((v.possible, v.criterion), (Possibility::No, Criterion::FidelityOfCoherence));
    let psi = PureState::from_probabilities(&[0.3, 0.3, 0.25, 0.15]).unwrap();
    let v = lemma1_check(&psi, &PureState::cosdit(3));
    assert_eq!((v.possible, v.criterion), (Possibility::Yes, Criterion::CosditTarget));
}

#[test]
fn majorization_examples() {
    let psi = PureState::from_probabilities(&[0.5, 0.3, 0.2]).unwrap();
    assert!(majorization_convertible(&PureState::cosdit(3), &psi));
    assert!(majorization_convertible(&PureState::cosdit(4), &psi));
    assert!(!majorization_convertible(&PureState::<f64>::basis(2, 0), &PureState::cosdit(2)));
    assert!(majorization_convertible(&flag(3, 0.5), &PureState::cosdit(2)));
    assert!(majorization_convertible(&flag(3, 0.4), &PureState::cosdit(2)));
    assert!(!majorization_convertible(&flag(3, 0.6), &PureState::cosdit(2)));
}

#[test]
fn plane_examples() {
    let cosbit = PureState::<f64>::cosdit(2);
    assert!(plane_criterion(2, &cosbit));
    assert!(!plane_criterion(1, &cosbit));
    assert!(!plane_criterion(2, &flag(3, 2.0 / 3.0)));
    assert!(plane_criterion(3, &flag(3, 2.0 / 3.0)));
}

#[test]
fn incomparable_pair() {
    let cosbit = PureState::<f64>::cosdit(2);
    let f = flag(3, 2.0 / 3.0);
    let a = conversion_verdict(&cosbit, &f);
    assert_eq!((a.possible, a.criterion), (Possibility::No, Criterion::Robustness));
    let b = conversion_verdict(&f, &cosbit);
    assert_eq!((b.possible, b.criterion), (Possibility::No, Criterion::FidelityOfCoherence));
    let json = serde_json::to_string(&b).unwrap();
    assert!(json.contains("fidelity-of-coherence"), "{json}");
}

#[test]
fn threshold_examples() {
    assert_eq!(flagpole_threshold(&Ch::dephasing(2), TOL).unwrap(), 1.0);
    assert!((flagpole_threshold(&Ch::qubit_rotation(PI / 4.0), TOL).unwrap() - 0.5).abs() < 1e-6);
    let want = 1.0 / (1.0 + 0.5f64.sqrt());
    assert!((flagpole_threshold(&Ch::qubit_rotation(PI / 8.0), TOL).unwrap() - want).abs() < 1e-6);
}

#[test]
fn construction_at_boundary() {
    let u = Ch::qubit_rotation(PI / 4.0);
    let sim = construct_flagpole_simulation(&u, &FlagpoleSpec::new(3, 0.5).unwrap(), TOL).unwrap();
    assert!(sim.residual < 1e-6, "{}", sim.residual);
    assert!(sim.mio_violation < 1e-6, "{}", sim.mio_violation);
    assert!(sim.mio.cptp_violation().unwrap().0 < 1e-6);
    let err = construct_flagpole_simulation(&u, &FlagpoleSpec::new(3, 0.6).unwrap(), TOL).unwrap_err();
    assert!(matches!(err, Error::Infeasible(_)));
}

#[test]
fn construction_for_mio_target() {
    let sim = construct_flagpole_simulation(&Ch::dephasing(2), &FlagpoleSpec::new(3, 1.0).unwrap(), TOL).unwrap();
    assert_eq!(sim.l1.choi(), Ch::dephasing(2).choi());
    assert!(sim.residual < 1e-12 && sim.mio_violation < 1e-12);
}

#[test]
fn construction_needs_large_resource() {
    let u = Ch::qubit_rotation(PI / 8.0);
    assert!(construct_flagpole_simulation(&u, &FlagpoleSpec::new(2, 0.5).unwrap(), TOL).is_err());
}

#[test]
fn boundary_matches_threshold() {
    let u = Ch::qubit_rotation(PI / 8.0);
    let b = flagpole_feasibility_boundary(&u, 3, 1e-3, TOL).unwrap();
    let t = flagpole_threshold(&u, TOL).unwrap();
    assert!((b - t).abs() <= 1e-3, "{b} vs {t}");
}
