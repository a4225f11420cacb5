//! Chaos diagnostics for the Setler system and its benchmarks.

pub mod bifurcation;
pub mod fit;
pub mod jacobian;
pub mod lyapunov;
pub mod sensitivity;

pub use bifurcation::{bifurcation_scan, bifurcation_scan_with, BifurcationData, BifurcationSettings};
pub use fit::{fit_asymptotic, AsymptoticFit};
pub use jacobian::{jacobian_autonomous, JacobianReport};
pub use lyapunov::{
    lyapunov_1d, lyapunov_map_two_trajectory, lyapunov_setler, lyapunov_two_trajectory, LyapunovEstimate,
    ScalarMap, TwoTrajectorySettings,
};
pub use sensitivity::{sensitivity_pair, sensitivity_pair_with, DivergenceSeries};
