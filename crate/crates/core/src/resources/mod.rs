//! Pure-state conversion criteria and flagpole resources.

mod construction;

#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

pub use construction::{construct_flagpole_simulation, flagpole_feasibility_boundary, FlagpoleSimulation, FEASIBILITY_TOL};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, PureState};
use crate::measures::{channel_robustness, lambda1_pure, pure_state_robustness};
use crate::scalar::Real;

/// Slack used when comparing probabilities and amplitude sums.
pub const CRITERION_TOL: f64 = 1e-9;

/// `|φ_p⟩ = √p|0⟩ + √((1−p)/(d−1)) Σ_{j≥1} |j⟩` with `p ∈ [1/d, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FlagpoleSpec<T: Real> {
    pub d: usize,
    pub p: T,
}

impl<T: Real> FlagpoleSpec<T> {
    pub fn new(d: usize, p: T) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("flagpole dimension must be at least 2, got {d}")));
        }
        let lo = T::one() / T::from_count(d);
        let slack = T::tol_floor(CRITERION_TOL);
        if !(p >= lo - slack && p <= T::one() + slack) {
            return Err(Error::InvalidParameter(format!("flagpole weight {p} outside [1/{d}, 1]")));
        }
        Ok(Self { d, p: p.max(lo).min(T::one()) })
    }

    pub fn state(&self) -> PureState<T> {
        flagpole_state(self)
    }
}

pub fn flagpole_state<T: Real>(spec: &FlagpoleSpec<T>) -> PureState<T> {
    let tail = (T::one() - spec.p) / T::from_count(spec.d - 1);
    let mut probs = vec![tail; spec.d];
    probs[0] = spec.p;
    PureState::from_probabilities(&probs).expect("flagpole weights are a distribution")
}

/// `|φ⟩ = √(1−p)|0⟩ − √(p/(d−1)) Σ_{j≥1} |j⟩`, orthogonal to the flagpole.
pub(crate) fn flagpole_partner<T: Real>(spec: &FlagpoleSpec<T>) -> PureState<T> {
    let tail = -(spec.p / T::from_count(spec.d - 1)).sqrt();
    let mut amps = vec![num_complex::Complex::new(tail, T::zero()); spec.d];
    amps[0] = num_complex::Complex::new((T::one() - spec.p).sqrt(), T::zero());
    PureState::normalized(amps).expect("nonzero vector")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Possibility {
    Yes,
    No,
    Undetermined,
}

/// Test that settled a conversion question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Largest diagonal entry cannot decrease.
    FidelityOfCoherence,
    /// Any state with all diagonal entries at most `1/d` reaches a rank-`d` cosdit.
    CosditTarget,
    /// Dephased target majorizes dephased source.
    Majorization,
    /// Cosdit dilution, `Σ_i √p_i ≤ √k`.
    Plane,
    /// Robustness cannot increase.
    Robustness,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConversionVerdict<T: Real> {
    pub possible: Possibility,
    pub criterion: Criterion,
    /// Source and target values of the quantity the criterion compares.
    pub witness: Option<(T, T)>,
}

impl<T: Real> ConversionVerdict<T> {
    fn undetermined() -> Self {
        Self { possible: Possibility::Undetermined, criterion: Criterion::None, witness: None }
    }
}

fn is_cosdit<T: Real>(phi: &PureState<T>) -> Option<usize> {
    let probs = phi.probabilities();
    let thr = T::lit(CRITERION_TOL);
    let support: Vec<T> = probs.into_iter().filter(|&q| q > thr).collect();
    let k = support.len();
    let u = T::one() / T::from_count(k);
    support.iter().all(|&q| (q - u).abs() <= thr).then_some(k)
}

/// Fidelity-of-coherence test for `ψ → φ`.
pub fn lemma1_check<T: Real>(psi: &PureState<T>, phi: &PureState<T>) -> ConversionVerdict<T> {
    let (a, b) = (lambda1_pure(psi), lambda1_pure(phi));
    let tol = T::lit(CRITERION_TOL);
    if a > b + tol {
        return ConversionVerdict { possible: Possibility::No, criterion: Criterion::FidelityOfCoherence, witness: Some((a, b)) };
    }
    if let Some(k) = is_cosdit(phi) {
        if a <= T::one() / T::from_count(k) + tol {
            return ConversionVerdict { possible: Possibility::Yes, criterion: Criterion::CosditTarget, witness: Some((a, b)) };
        }
    }
    ConversionVerdict::undetermined()
}

fn sorted_desc<T: Real>(mut v: Vec<T>, d: usize) -> Vec<T> {
    v.resize(d, T::zero());
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// `true` when the dephased target majorizes the dephased source, so that `ψ → φ` is possible.
pub fn majorization_convertible<T: Real>(psi: &PureState<T>, phi: &PureState<T>) -> bool {
    let d = psi.dim().max(phi.dim());
    let (src, dst) = (sorted_desc(psi.probabilities(), d), sorted_desc(phi.probabilities(), d));
    let tol = T::lit(CRITERION_TOL);
    let (mut s, mut t) = (T::zero(), T::zero());
    for (x, y) in src.iter().zip(&dst) {
        s += *x;
        t += *y;
        if t < s - tol {
            return false;
        }
    }
    true
}

/// `Σ_i √p_i ≤ √k`: a rank-`k` cosdit dilutes into `φ`.
pub fn plane_criterion<T: Real>(k: usize, phi: &PureState<T>) -> bool {
    let s: T = phi.probabilities().into_iter().map(|q| q.max(T::zero()).sqrt()).sum();
    s <= T::from_count(k).sqrt() + T::lit(CRITERION_TOL)
}

/// Combines the available criteria for `ψ → φ`.
pub fn conversion_verdict<T: Real>(psi: &PureState<T>, phi: &PureState<T>) -> ConversionVerdict<T> {
    if majorization_convertible(psi, phi) {
        return ConversionVerdict { possible: Possibility::Yes, criterion: Criterion::Majorization, witness: None };
    }
    let (ra, rb) = (pure_state_robustness(psi), pure_state_robustness(phi));
    if rb > ra + T::lit(CRITERION_TOL) {
        return ConversionVerdict { possible: Possibility::No, criterion: Criterion::Robustness, witness: Some((ra, rb)) };
    }
    if let Some(k) = is_cosdit(psi) {
        let possible = if plane_criterion(k, phi) { Possibility::Yes } else { Possibility::No };
        return ConversionVerdict { possible, criterion: Criterion::Plane, witness: Some((ra, rb)) };
    }
    let v = lemma1_check(psi, phi);
    if v.possible != Possibility::Undetermined {
        return v;
    }
    ConversionVerdict::undetermined()
}

/// Least coherent flagpole reachable from `ψ` by majorization, in the same dimension.
///
/// `p = max_k (S_k (d−1) − (k−1)) / (d−k)` over `k < d`, with `S_k` the sum of the
/// `k` largest probabilities; `k = 1` gives `λ₁(ψ)`.
pub fn least_flagpole<T: Real>(psi: &PureState<T>) -> Result<FlagpoleSpec<T>> {
    let d = psi.dim();
    let probs = sorted_desc(psi.probabilities(), d);
    let mut s = T::zero();
    let mut p = T::one() / T::from_count(d);
    for k in 1..d {
        s += probs[k - 1];
        let bound = (s * T::from_count(d - 1) - T::from_count(k - 1)) / T::from_count(d - k);
        p = p.max(bound);
    }
    FlagpoleSpec::new(d, p.min(T::one()))
}

/// Largest flagpole weight guaranteed to implement `n`, `1/(1 + C_R(N))`.
pub fn flagpole_threshold<T: Real>(n: &Channel<T>, tol: f64) -> Result<T> {
    Ok(T::one() / (T::one() + channel_robustness(n, tol)?))
}

pub(crate) fn projector_complement<T: Real>(d: usize, parts: &[&HermitianOperator<T>]) -> HermitianOperator<T> {
    parts.iter().fold(HermitianOperator::identity(d), |acc, p| &acc - *p)
}
