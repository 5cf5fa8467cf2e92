//! Sweeps behind the four figures. Rows are computed in parallel and collected in grid order.

use std::f64::consts::PI;

use miocoh::implementation::{
    coherence_left_sdp, cost_robustness, gate_fidelity, implementation_error, required_rank, ROUNDING_GUARD,
};
use miocoh::resources::least_flagpole;
use miocoh::{Channel64, PureState64, SimulationQuery64};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::args::Figure;
use crate::error::CliError;
use crate::output::{SweepMeta, SweepResult};

pub const FIG4_THETAS: [f64; 3] = [PI / 30.0, PI / 7.0, PI / 4.0];
pub const FIG4_STEPS: usize = 50;
pub const FIG5_THETA: f64 = PI / 14.0;
pub const FIG5_RESOLUTION: f64 = 0.02;
/// Fidelity above `1 − EXACT_TOL` counts as an exact implementation.
pub const EXACT_TOL: f64 = 1e-6;
pub const THETA_STEPS: usize = 64;
pub const FIG6_EPSILONS: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const FIG7_EPSILONS: [f64; 4] = [0.15, 0.25, 0.45, 0.75];
pub const FIG7_INPUTS: [f64; 4] = [0.6, 0.9, 0.99, 1.0];
pub const FIG7_OUTPUT_DIM: usize = 2;

#[derive(Clone, Debug)]
pub struct Settings {
    pub tol: f64,
    pub seed: u64,
    pub steps: Option<usize>,
    pub resolution: Option<f64>,
}

struct Table {
    schema: &'static [&'static str],
    rows: Vec<Vec<f64>>,
    solves: usize,
    infeasible: usize,
    parameters: Map<String, Value>,
    tolerances: Map<String, Value>,
}

pub fn figure(name: Figure, s: &Settings) -> Result<SweepResult, CliError> {
    let t = match name {
        Figure::Fig4 => fig4(s)?,
        Figure::Fig5 => fig5(s)?,
        Figure::Fig6 => fig6(s)?,
        Figure::Fig7 => fig7(s)?,
    };
    debug_assert!(t.rows.iter().all(|r| r.len() == t.schema.len()));
    let mut tolerances = t.tolerances;
    tolerances.insert("tol".into(), json!(s.tol));
    tolerances.insert("solver_gap_target".into(), json!(s.tol * 0.1));
    Ok(SweepResult {
        schema: t.schema.iter().map(|c| c.to_string()).collect(),
        rows: t.rows,
        meta: SweepMeta {
            figure: name.name().into(),
            version: env!("CARGO_PKG_VERSION").into(),
            git_rev: env!("MIOCOH_GIT_REV").into(),
            tolerances,
            parameters: t.parameters,
            solves: t.solves,
            infeasible: t.infeasible,
            seed: s.seed,
        },
    })
}

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Pure qubit state with robustness `c`, `√a|0⟩ + √(1−a)|1⟩` with `2√(a(1−a)) = c`.
pub fn qubit_with_robustness(c: f64) -> Result<PureState64, CliError> {
    let a = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(PureState64::from_probabilities(&[a, 1.0 - a])?)
}

/// `θ_j = j π / (4 steps)` for `j = 1..=steps`.
pub fn theta_grid(steps: usize) -> Vec<f64> {
    (1..=steps).map(|j| PI / 4.0 * j as f64 / steps as f64).collect()
}

fn check_steps(steps: usize, min: usize) -> Result<usize, CliError> {
    if steps < min {
        return Err(CliError::Usage(format!("need at least {min} grid steps, got {steps}")));
    }
    Ok(steps)
}

/// Implementation error of `U_θ` against the coherence of a pure qubit resource.
fn fig4(s: &Settings) -> Result<Table, CliError> {
    let steps = check_steps(s.steps.unwrap_or(FIG4_STEPS), 2)?;
    let grid: Vec<(f64, f64)> = FIG4_THETAS
        .iter()
        .flat_map(|&t| (0..steps).map(move |i| (t, i as f64 / (steps - 1) as f64)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(theta, c)| {
            let q = SimulationQuery64::with_pure(Channel64::qubit_rotation(theta), &qubit_with_robustness(c)?, 0.0)?;
            let e = implementation_error(&q, s.tol)?.value;
            Ok(vec![theta, theta / PI, c, e])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table {
        schema: &["theta", "theta_over_pi", "resource_robustness", "error"],
        solves: rows.len(),
        rows,
        infeasible: 0,
        parameters: params(&[("thetas", json!(FIG4_THETAS)), ("steps", json!(steps))]),
        tolerances: Map::new(),
    })
}

/// Gate fidelity of `U_{π/14}` over the qutrit probability simplex.
fn fig5(s: &Settings) -> Result<Table, CliError> {
    let r = s.resolution.unwrap_or(FIG5_RESOLUTION);
    if !(r > 0.0 && r <= 0.5) {
        return Err(CliError::Usage(format!("resolution must lie in (0, 0.5], got {r}")));
    }
    let n = (1.0 / r).round() as usize;
    let grid: Vec<(usize, usize)> = (0..=n).flat_map(|i| (0..=n - i).map(move |j| (i, j))).collect();
    let target = Channel64::qubit_rotation(FIG5_THETA);
    let cos3 = 1.0 / 3f64.sqrt();
    let rows = grid
        .par_iter()
        .map(|&(i, j)| {
            let (px, py) = (i as f64 / n as f64, j as f64 / n as f64);
            let pz = (1.0 - px - py).max(0.0);
            let psi = PureState64::from_probabilities(&[pz, px, py])?;
            let f = gate_fidelity(&SimulationQuery64::with_pure(target.clone(), &psi, 0.0)?, s.tol)?.value;
            let mut sorted = [pz, px, py];
            sorted.sort_by(|a, b| b.total_cmp(a));
            let overlap = cos3 * (pz.sqrt() + px.sqrt() + py.sqrt());
            Ok(vec![
                px,
                py,
                pz,
                f,
                f64::from(f >= 1.0 - EXACT_TOL),
                overlap,
                sorted[0],
                sorted[1] - sorted[2],
                least_flagpole(&psi)?.p,
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table {
        schema: &[
            "p_x",
            "p_y",
            "p_z",
            "fidelity",
            "exact",
            "cosdit_overlap",
            "lambda1",
            "flagpole_offset",
            "least_flagpole_p",
        ],
        solves: rows.len(),
        rows,
        infeasible: 0,
        parameters: params(&[
            ("theta", json!(FIG5_THETA)),
            ("resolution", json!(r)),
            ("flagpole_threshold", json!(1.0 / (1.0 + (2.0 * FIG5_THETA).sin()))),
        ]),
        tolerances: params(&[("exact_fidelity", json!(EXACT_TOL))]),
    })
}

/// Amortized and one-shot costs of `U_θ` for several error thresholds.
fn fig6(s: &Settings) -> Result<Table, CliError> {
    let steps = check_steps(s.steps.unwrap_or(THETA_STEPS), 1)?;
    let grid: Vec<(f64, f64)> =
        theta_grid(steps).into_iter().flat_map(|t| FIG6_EPSILONS.iter().map(move |&e| (t, e))).collect();
    let rows = grid
        .par_iter()
        .map(|&(theta, eps)| {
            let c = cost_robustness(&Channel64::qubit_rotation(theta), eps, s.tol)?;
            let rank = required_rank(c, s.tol);
            Ok(vec![theta, theta / PI, eps, c, (1.0 + c).log2(), (rank as f64).log2()])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table {
        schema: &["theta", "theta_over_pi", "epsilon", "robustness", "amortized_cost_bits", "sim_cost_bits"],
        solves: rows.len(),
        rows,
        infeasible: 0,
        parameters: params(&[("steps", json!(steps)), ("epsilons", json!(FIG6_EPSILONS))]),
        tolerances: params(&[("rounding_guard", json!(ROUNDING_GUARD * s.tol))]),
    })
}

/// Coherence left after implementing `U_θ`; infeasible points get `feasible = 0` and `NaN`.
fn fig7(s: &Settings) -> Result<Table, CliError> {
    let steps = check_steps(s.steps.unwrap_or(THETA_STEPS), 1)?;
    let thetas = theta_grid(steps);
    let mut grid = Vec::new();
    for &c in &FIG7_INPUTS {
        for &e in &FIG7_EPSILONS {
            grid.extend(thetas.iter().map(|&t| (c, e, t)));
        }
    }
    let rows = grid
        .par_iter()
        .map(|&(c, eps, theta)| {
            let q = SimulationQuery64::with_pure(Channel64::qubit_rotation(theta), &qubit_with_robustness(c)?, eps)?;
            let left = match coherence_left_sdp(&q, FIG7_OUTPUT_DIM, s.tol) {
                Ok(v) => Some(v),
                Err(miocoh::Error::Infeasible(_)) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(vec![c, eps, theta, theta / PI, f64::from(left.is_some()), left.unwrap_or(f64::NAN)])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let infeasible = rows.iter().filter(|r| r[4] == 0.0).count();
    Ok(Table {
        schema: &["input_robustness", "epsilon", "theta", "theta_over_pi", "feasible", "coherence_left"],
        solves: rows.len(),
        rows,
        infeasible,
        parameters: params(&[
            ("steps", json!(steps)),
            ("epsilons", json!(FIG7_EPSILONS)),
            ("input_robustness", json!(FIG7_INPUTS)),
            ("output_dim", json!(FIG7_OUTPUT_DIM)),
        ]),
        tolerances: Map::new(),
    })
}
