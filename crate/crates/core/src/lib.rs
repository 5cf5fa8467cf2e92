//! Coherence of quantum channels under maximally incoherent operations.
//!
//! Robustness measures for states and channels, simulation and amortized
//! costs, implementation with arbitrary resources, and flagpole resources.
//! Every quantity is computed by a small dense semidefinite-program solver in
//! [`sdp`]. The numeric layer is generic over the scalar type; `f64` aliases
//! are provided below.
//!
//! ```
//! use miocoh::{measures, Channel64};
//!
//! let u = Channel64::qubit_rotation(std::f64::consts::PI / 8.0);
//! let c = measures::channel_robustness(&u, 1e-8).unwrap();
//! assert!((c - 0.5f64.sqrt()).abs() < 1e-6);
//! ```

pub mod channels;
pub mod descriptor;
pub mod error;
pub mod implementation;
pub mod linalg;
pub mod measures;
pub mod random;
pub mod resources;
pub mod scalar;
pub mod sdp;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Channel64 = channels::Channel<f64>;
pub type Hermitian64 = linalg::HermitianOperator<f64>;
pub type PureState64 = linalg::PureState<f64>;
pub type Matrix64 = linalg::ComplexMatrix<f64>;
pub type SdpProblem64 = sdp::SdpProblem<f64>;
pub type SimulationQuery64 = implementation::SimulationQuery<f64>;
pub type FlagpoleSpec64 = resources::FlagpoleSpec<f64>;
