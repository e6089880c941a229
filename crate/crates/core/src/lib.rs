//! Linear flocks on a ring: agents `k = 0..N` with periodic coupling
//!
//! ```text
//! z_k'' = g_x sum_j rho_x[j] z_{k+j} + g_v sum_j rho_v[j] z'_{k+j}
//! ```
//!
//! where `z_k` is the deviation of agent `k` from its place in the formation.
//! The crate provides the closed-form spectrum of this system, a stability
//! verdict valid for every ring size, wave velocities and the two-wave
//! approximation of the dynamics, and a Runge–Kutta simulator used as an
//! independent oracle.

pub mod cli;
pub mod draws;
pub mod error;
pub mod model;
pub mod sim;
pub mod spectral;
pub mod stability;
pub mod wavefield;

pub use error::{Error, Result};
pub use model::{DenseSystem, FlockParams, Moments, ValidationError, Violation};
