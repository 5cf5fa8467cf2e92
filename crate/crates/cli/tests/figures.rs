use std::f64::consts::PI;

use miocoh_cli::args::Figure;
use miocoh_cli::figures::{figure, Settings, EXACT_TOL};
use miocoh_cli::SweepResult;

const TOL: f64 = 1e-7;
const SLACK: f64 = 1e-6;

fn sweep(name: Figure, steps: Option<usize>, resolution: Option<f64>) -> SweepResult {
    figure(name, &Settings { tol: TOL, seed: 0, steps, resolution }).unwrap()
}

fn col(s: &SweepResult, name: &str) -> Vec<f64> {
    let i = s.column(name).unwrap_or_else(|| panic!("no column {name}"));
    s.rows.iter().map(|r| r[i]).collect()
}

fn complete(s: &SweepResult) {
    assert!(!s.rows.is_empty());
    assert!(s.rows.iter().all(|r| r.len() == s.schema.len()));
}

#[test]
fn fig4_exact_only_with_cosbit_and_monotone() {
    let s = sweep(Figure::Fig4, Some(11), None);
    complete(&s);
    assert_eq!(s.rows.len(), 33);
    let (theta, c, err) = (col(&s, "theta"), col(&s, "resource_robustness"), col(&s, "error"));
    for k in 0..s.rows.len() {
        if (theta[k] - PI / 4.0).abs() < 1e-12 && c[k] == 1.0 {
            assert!(err[k] <= 1e-6);
        }
        if k % 11 != 0 {
            assert!(err[k] <= err[k - 1] + SLACK, "row {k}");
        }
    }
}

#[test]
fn fig5_maximally_coherent_qutrit_is_exact() {
    let s = sweep(Figure::Fig5, None, Some(1.0 / 3.0));
    complete(&s);
    assert_eq!(s.rows.len(), 10);
    let (px, py, f, exact) = (col(&s, "p_x"), col(&s, "p_y"), col(&s, "fidelity"), col(&s, "exact"));
    let k = (0..s.rows.len()).find(|&k| (px[k] - 1.0 / 3.0).abs() < 1e-12 && (py[k] - 1.0 / 3.0).abs() < 1e-12).unwrap();
    assert!(f[k] >= 1.0 - EXACT_TOL);
    assert_eq!(exact[k], 1.0);
    assert!((col(&s, "cosdit_overlap")[k] - 1.0).abs() < 1e-12);
    // the incoherent corner
    let corner = (0..s.rows.len()).find(|&k| px[k] == 0.0 && py[k] == 0.0).unwrap();
    assert_eq!(exact[corner], 0.0);
}

#[test]
fn fig5_flagpoles_below_threshold_are_exact() {
    let s = sweep(Figure::Fig5, None, Some(0.1));
    let threshold = s.meta.parameters["flagpole_threshold"].as_f64().unwrap();
    let (least, lambda1, exact) = (col(&s, "least_flagpole_p"), col(&s, "lambda1"), col(&s, "exact"));
    for k in 0..s.rows.len() {
        if least[k] <= threshold - 1e-9 {
            assert_eq!(exact[k], 1.0, "row {k}");
        }
        if lambda1[k] > threshold + 1e-9 {
            assert_eq!(exact[k], 0.0, "row {k}");
        }
    }
}

#[test]
fn fig6_closed_form_and_monotone() {
    let steps = 8;
    let s = sweep(Figure::Fig6, Some(steps), None);
    complete(&s);
    let (theta, eps, cost) = (col(&s, "theta"), col(&s, "epsilon"), col(&s, "amortized_cost_bits"));
    let n_eps = 6;
    for k in 0..s.rows.len() {
        if eps[k] == 0.0 {
            assert!((cost[k] - (1.0 + (2.0 * theta[k]).sin()).log2()).abs() < 1e-5);
            if (theta[k] - PI / 4.0).abs() < 1e-12 {
                assert!((cost[k] - 1.0).abs() < 1e-5);
            }
        } else {
            assert!(cost[k] <= cost[k - 1] + SLACK);
        }
        if k >= n_eps {
            assert!(cost[k] + SLACK >= cost[k - n_eps]);
        }
    }
    assert!(cost[n_eps - 1].abs() < 1e-5);
}

#[test]
fn fig7_more_error_leaves_more_coherence() {
    let s = sweep(Figure::Fig7, Some(4), None);
    complete(&s);
    assert_eq!(s.rows.len(), 64);
    let (feasible, left) = (col(&s, "feasible"), col(&s, "coherence_left"));
    // rows are ordered by input coherence, then ε, then θ
    for k in 4..s.rows.len() {
        if k % 16 >= 4 && feasible[k - 4] == 1.0 {
            assert_eq!(feasible[k], 1.0);
            assert!(left[k] + SLACK >= left[k - 4], "row {k}");
        }
    }
    assert!(feasible.iter().zip(&left).all(|(f, l)| (*f == 1.0) == l.is_finite()));
    assert_eq!(s.meta.infeasible, feasible.iter().filter(|f| **f == 0.0).count());
}

#[test]
fn sweeps_are_deterministic() {
    let a = sweep(Figure::Fig4, Some(5), None).to_csv().unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| sweep(Figure::Fig4, Some(5), None)).to_csv().unwrap();
    assert_eq!(a, b);
}
