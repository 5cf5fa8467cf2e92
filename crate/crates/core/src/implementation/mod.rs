//! Realizing channels with coherent resources under incoherent operations.

mod programs;

#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

pub use programs::{
    coherence_left_sdp, gate_fidelity, implementation_error, ImplementationResult, DEFAULT_OUTPUT_RESOURCE_DIM,
};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, PureState};
use crate::measures::{channel_robustness, smoothed_channel_robustness};
use crate::scalar::Real;

/// Multiple of the solver tolerance subtracted before rounding robustness to an integer rank.
pub const ROUNDING_GUARD: f64 = 10.0;

/// A target channel, a resource state on `R` and an error budget.
#[derive(Clone, Debug)]
pub struct SimulationQuery<T: Real> {
    pub target: Channel<T>,
    pub resource: HermitianOperator<T>,
    pub epsilon: T,
}

impl<T: Real> SimulationQuery<T> {
    pub fn new(target: Channel<T>, resource: HermitianOperator<T>, epsilon: T) -> Result<Self> {
        resource.check_density(T::tol_floor(1e-8))?;
        if !(epsilon >= T::zero()) {
            return Err(Error::InvalidParameter(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        Ok(Self { target, resource, epsilon })
    }

    pub fn with_pure(target: Channel<T>, resource: &PureState<T>, epsilon: T) -> Result<Self> {
        Self::new(target, resource.projector(), epsilon)
    }

    pub fn cosdit(target: Channel<T>, k: usize, epsilon: T) -> Result<Self> {
        Self::with_pure(target, &PureState::cosdit(k), epsilon)
    }

    pub fn resource_dim(&self) -> usize {
        self.resource.dim()
    }
}

/// `C_R^ε(N)`, through the incoherent-basis route when `ε = 0`.
pub fn cost_robustness<T: Real>(n: &Channel<T>, epsilon: T, tol: f64) -> Result<T> {
    if epsilon == T::zero() {
        channel_robustness(n, tol)
    } else {
        smoothed_channel_robustness(n, epsilon, tol)
    }
}

fn guard<T: Real>(tol: f64) -> T {
    T::lit(ROUNDING_GUARD * tol)
}

/// `⌈1 + C_R − guard⌉`: the smallest cosdit rank that implements a channel of robustness `c_r`.
pub fn required_rank<T: Real>(c_r: T, tol: f64) -> usize {
    let r = (T::one() + c_r - guard(tol)).ceil().max(T::one());
    r.to_f64_lossy() as usize
}

/// One-shot simulation cost `log₂⌈1 + C_R^ε(N)⌉` in bits.
pub fn simulation_cost<T: Real>(n: &Channel<T>, epsilon: T, tol: f64) -> Result<T> {
    let c = cost_robustness(n, epsilon, tol)?;
    Ok(T::from_count(required_rank(c, tol)).log2())
}

/// Amortized cost with recycling, `C_LR^ε(N)` in bits.
pub fn amortized_cost<T: Real>(n: &Channel<T>, epsilon: T, tol: f64) -> Result<T> {
    Ok((T::one() + cost_robustness(n, epsilon, tol)?).log2())
}

/// Coherence that can be handed back after implementing a channel with a rank-`k` cosdit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Recycling<T: Real> {
    /// Largest robustness of the returned resource, `k/(1+C_R) − 1`.
    pub max_robustness_left: T,
    /// Rank of the best returned cosdit, `⌊k/(1+C_R)⌋`.
    pub cosdit_rank: usize,
}

/// Recycling bound for a channel of known robustness `c_r`.
pub fn recycling_from_robustness<T: Real>(c_r: T, k: usize, tol: f64) -> Result<Recycling<T>> {
    let needed = required_rank(c_r, tol);
    if k < needed {
        return Err(Error::ResourceBelowCost { needed, given: k });
    }
    let ratio = T::from_count(k) / (T::one() + c_r);
    let m = (ratio + guard(tol)).floor().max(T::one());
    Ok(Recycling { max_robustness_left: (ratio - T::one()).max(T::zero()), cosdit_rank: m.to_f64_lossy() as usize })
}

pub fn recycling_bound<T: Real>(n: &Channel<T>, k: usize, tol: f64) -> Result<Recycling<T>> {
    recycling_from_robustness(channel_robustness(n, tol)?, k, tol)
}

/// Outcome of implementing a sequence of channels with one cosdit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SequenceCost<T: Real> {
    pub final_rank: usize,
    /// `log₂(k/k′)`.
    pub bits: T,
    /// Rank of the cosdit after each stage.
    pub ranks: Vec<usize>,
    /// `Σ_i C_LR(N_i)`.
    pub amortized_sum: T,
}

/// Implements `channels` in order, recycling a cosdit of rank `k` at each stage.
pub fn sequence_cost<T: Real>(channels: &[Channel<T>], k: usize, tol: f64) -> Result<SequenceCost<T>> {
    let mut rank = k;
    let mut ranks = Vec::with_capacity(channels.len());
    let mut amortized_sum = T::zero();
    for n in channels {
        let c = channel_robustness(n, tol)?;
        rank = recycling_from_robustness(c, rank, tol)?.cosdit_rank;
        amortized_sum += (T::one() + c).log2();
        ranks.push(rank);
    }
    let bits = (T::from_count(k) / T::from_count(rank)).log2();
    // Σ C_amo ≤ log(k/k′) ≤ Σ C_amo + n/k′, the slack expressed in bits.
    let slack = T::from_count(channels.len()) / (T::from_count(rank) * T::LN_2());
    let g = guard::<T>(tol) * T::from_count(channels.len().max(1));
    if bits < amortized_sum - g || bits > amortized_sum + slack + g {
        return Err(Error::Solver(format!("sequence bound violated: {bits} bits against {amortized_sum}")));
    }
    Ok(SequenceCost { final_rank: rank, bits, ranks, amortized_sum })
}

/// Costs of implementing one channel with a cosdit resource.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CostReport<T: Real> {
    pub sim_cost_bits: T,
    pub amortized_cost_bits: T,
    pub input_rank: usize,
    pub output_rank: usize,
    pub coherence_left_bound: T,
}

impl<T: Real> CostReport<T> {
    /// Uses the smallest sufficient cosdit when `k` is `None`.
    pub fn new(n: &Channel<T>, epsilon: T, k: Option<usize>, tol: f64) -> Result<Self> {
        let c = cost_robustness(n, epsilon, tol)?;
        let needed = required_rank(c, tol);
        let k = k.unwrap_or(needed);
        let rec = recycling_from_robustness(c, k, tol)?;
        Ok(Self {
            sim_cost_bits: T::from_count(needed).log2(),
            amortized_cost_bits: (T::one() + c).log2(),
            input_rank: k,
            output_rank: rec.cosdit_rank,
            coherence_left_bound: rec.max_robustness_left,
        })
    }
}
