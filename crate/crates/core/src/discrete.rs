//! Discrete-time Setler map.
//!
//! Three stages, each usable on its own: the additive linear baseline,
//! the trigonometric nonlinear terms, and the fully forced map whose
//! forcing phase is the integer step index.

use libm::{cos, sin};

use crate::continuous::setler_rhs;
use crate::error::{ensure_finite, Diverged, Error, Result};
use crate::state::{all_finite, SetlerParams, SphericalState, StateVector, Trajectory};

/// Per-step increments of the linear baseline model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearIncrements {
    pub d_alpha: f64,
    pub d_delta: f64,
    pub d_r: f64,
}

impl LinearIncrements {
    pub fn new(d_alpha: f64, d_delta: f64, d_r: f64) -> Result<Self> {
        Ok(Self {
            d_alpha: ensure_finite("d_alpha", d_alpha)?,
            d_delta: ensure_finite("d_delta", d_delta)?,
            d_r: ensure_finite("d_r", d_r)?,
        })
    }
}

/// Advances each component by `lambda` times its increment.
pub fn linear_step(s: SphericalState, inc: LinearIncrements, lambda: f64) -> SphericalState {
    SphericalState::from_finite([
        s.alpha() + lambda * inc.d_alpha,
        s.delta() + lambda * inc.d_delta,
        s.r() + lambda * inc.d_r,
    ])
}

/// The terms `(f, g, h)` added to `(alpha, delta, r)` by the nonlinear map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearTerms {
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

pub fn nonlinear_terms(s: SphericalState, lambda: f64) -> NonlinearTerms {
    let (sa, ca) = (sin(s.alpha()), cos(s.alpha()));
    let (sd, cd) = (sin(s.delta()), cos(s.delta()));
    let coupling = sd * ca;
    NonlinearTerms {
        f: lambda * sa * cd,
        g: lambda * ca * sd,
        h: lambda * (coupling * coupling),
    }
}

fn forced_raw(y: [f64; 3], p: &SetlerParams, n: u64) -> [f64; 3] {
    let f = setler_rhs(p, n as f64, y);
    [y[0] + f[0], y[1] + f[1], y[2] + f[2]]
}

/// One step of the forced map at step index `n`.
///
/// Fails only when the result overflows, which needs parameters near
/// `f64::MAX`.
pub fn forced_step(s: SphericalState, p: &SetlerParams, n: u64) -> Result<SphericalState> {
    let out = forced_raw(s.to_array(), p, n);
    if all_finite(&out) {
        Ok(SphericalState::from_finite(out))
    } else {
        Err(Error::Diverged { last_finite: n as f64 })
    }
}

/// Iterates the forced map `n_steps` times. Times are the step indices.
///
/// Stops at the first non-finite state; the error carries the trajectory
/// up to the last finite step.
pub fn iterate_map(
    s0: SphericalState,
    p: &SetlerParams,
    n_steps: usize,
) -> Result<Trajectory, Diverged<Trajectory>> {
    let mut traj = Trajectory::with_capacity(0.0, s0, n_steps + 1);
    let mut y = s0.to_array();
    for k in 0..n_steps {
        let next = forced_raw(y, p, k as u64);
        if !all_finite(&next) {
            return Err(Diverged {
                last_finite: k as f64,
                partial: traj,
            });
        }
        y = next;
        traj.push((k + 1) as f64, SphericalState::from_finite(y))
            .expect("step indices increase");
    }
    Ok(traj)
}
