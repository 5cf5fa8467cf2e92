//! Coherence measures for states and channels.
//!
//! All logarithms are base 2.

mod channel;
mod smoothed;
mod state;

#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

pub use channel::{
    channel_robustness, channel_robustness_dual_sdp, channel_robustness_primal, cohering_power, cq_asymptotic_values,
    dmax, log_robustness_via_dmax, sampled_cohering_power, COHERING_SAMPLES,
};
pub use smoothed::{
    smoothed_channel_robustness, smoothed_channel_robustness_dual, smoothed_log_robustness,
    smoothed_log_robustness_copies, SmoothedQuery,
};
pub use state::{
    as_pure_state, coherence_rank, l1_coherence, lambda1, lambda1_pure, log_robustness, pure_state_robustness,
    relative_entropy_coherence, state_robustness, state_robustness_dual, RANK_THRESHOLD,
};

use crate::channels::Channel;
use crate::error::Result;
use crate::linalg::HermitianOperator;
use crate::scalar::Real;

/// Every state measure at once, with the primal/dual robustness gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CoherenceReport<T: Real> {
    pub c_r: T,
    pub c_lr: T,
    pub c_l1: T,
    pub c_rel_ent: T,
    /// Only defined for pure states.
    pub rank: Option<usize>,
    pub lambda1: T,
    pub diagnostics: Diagnostics<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Diagnostics<T: Real> {
    pub robustness_dual: T,
    pub robustness_gap: T,
}

impl<T: Real> CoherenceReport<T> {
    pub fn of_state(rho: &HermitianOperator<T>, tol: f64) -> Result<Self> {
        let c_r = state_robustness(rho, tol)?;
        let dual = state_robustness_dual(rho, tol)?;
        let rank = as_pure_state(rho)?.map(|psi| coherence_rank(&psi));
        Ok(Self {
            c_r,
            c_lr: log_robustness(c_r),
            c_l1: l1_coherence(rho),
            c_rel_ent: relative_entropy_coherence(rho)?,
            rank,
            lambda1: lambda1(rho),
            diagnostics: Diagnostics { robustness_dual: dual, robustness_gap: (c_r - dual).abs() },
        })
    }
}

/// Channel measures, both robustness routes and the MIO check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ChannelReport<T: Real> {
    pub c_r: T,
    pub c_r_primal: T,
    pub c_lr: T,
    pub is_mio: bool,
    pub mio_violation: T,
    pub route_gap: T,
}

impl<T: Real> ChannelReport<T> {
    pub fn of_channel(n: &Channel<T>, tol: f64) -> Result<Self> {
        let c_r = channel_robustness(n, tol)?;
        let c_r_primal = channel_robustness_primal(n, tol)?;
        let mio = n.is_mio(T::tol_floor(tol));
        Ok(Self {
            c_r,
            c_r_primal,
            c_lr: log_robustness(c_r),
            is_mio: mio.is_mio,
            mio_violation: mio.max_violation,
            route_gap: (c_r - c_r_primal).abs(),
        })
    }
}
