//! Sum-capacity bounds for the symmetric two-user Gaussian interference
//! channel with a common message.
//!
//! The channel is `Y1 = X1 + c·X2 + Z1`, `Y2 = X2 + c·X1 + Z2` with unit-variance
//! noise, per-user power `P` and cross gain `c ≥ 0`. Each transmitter splits its
//! power between a shared common layer `P0` and a private layer `P - P0`.
//!
//! * [`model`]: the superposition inner bound, the genie objective and its
//!   feasibility constraints.
//! * [`genie`]: numerical min–max evaluation of the genie-aided outer bound.
//! * [`regimes`]: closed-form regime tests and the smart-genie construction.
//! * [`gaussian`]: covariance bookkeeping and log-det mutual information,
//!   used to cross-check the closed forms.
//! * [`fme`]: exact Fourier–Motzkin elimination for rate-region projections.
//! * [`sweep`] and [`verify`]: grid sweeps to CSV and randomized property suites.
//!
//! All rates are in bits per channel use.

pub mod error;
pub mod fme;
pub mod gaussian;
pub mod genie;
pub mod model;
pub mod regimes;
pub mod rng;
pub mod simplex;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use genie::{upper_bound_sum_capacity, OptimizerConfig};
pub use model::{lower_bound_sum_rate, max_lower_bound, BoundReport, BoundStatus, ChannelParams, GenieParams, PowerAllocation};
