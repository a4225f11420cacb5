//! Numerics for the Setler stellar-position dynamical system.
//!
//! The state is a triple `(alpha, delta, r)`: right ascension, declination
//! and radial distance, treated as abstract dynamical variables. The crate
//! provides
//!
//! - the forced discrete map and its continuous counterpart ([`discrete`],
//!   [`continuous`]), with a fixed-step RK4 integrator generic over the
//!   vector field,
//! - chaos diagnostics ([`analysis`]): Lyapunov estimators, bifurcation
//!   scans, the autonomous Jacobian, sensitivity pairs and exponential
//!   tail fits,
//! - Perelman F/W entropy functionals ([`entropy`]) reported alongside
//!   independent quadrature and Monte-Carlo values,
//! - the Lorenz benchmark system ([`reference`]).
//!
//! Everything is `no_std` + `alloc`. IO, the CLI and thread-parallel
//! execution live in the `setler` crate, which plugs into the
//! [`exec::Executor`] trait.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

extern crate alloc;

pub mod analysis;
pub mod continuous;
pub mod discrete;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod montecarlo;
pub mod quadrature;
pub mod reference;
pub mod state;

pub use error::{Diverged, Error, Result};
pub use exec::{Executor, Sequential};
pub use state::{
    spherical_to_cartesian, wrap_state, CartesianState, SetlerParams, SphericalState,
    StateVector, TimeGrid, Trajectory,
};
