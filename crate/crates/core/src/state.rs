//! Domain types shared by every module: states, parameters, grids and
//! trajectories.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use libm::{cos, floor, fmod, round, sin};

use crate::error::{ensure_finite, Error, Result};

/// Position in `(alpha, delta, r)`: right ascension, declination, distance.
///
/// Angles are radians and are never wrapped implicitly; see [`wrap_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalState {
    alpha: f64,
    delta: f64,
    r: f64,
}

impl SphericalState {
    pub fn new(alpha: f64, delta: f64, r: f64) -> Result<Self> {
        Ok(Self {
            alpha: ensure_finite("alpha", alpha)?,
            delta: ensure_finite("delta", delta)?,
            r: ensure_finite("r", r)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `[alpha, delta, r]`.
    pub fn to_array(self) -> [f64; 3] {
        [self.alpha, self.delta, self.r]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianState {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

pub fn spherical_to_cartesian(s: SphericalState) -> CartesianState {
    let (ca, sa) = (cos(s.alpha), sin(s.alpha));
    let (cd, sd) = (cos(s.delta), sin(s.delta));
    CartesianState {
        x: s.r * cd * ca,
        y: s.r * cd * sa,
        z: s.r * sd,
    }
}

/// Maps `alpha` into `[0, 2π)`. `delta` and `r` pass through untouched.
pub fn wrap_state(s: SphericalState) -> SphericalState {
    SphericalState {
        alpha: wrap_angle(s.alpha),
        ..s
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut m = fmod(a, TAU);
    if m < 0.0 {
        m += TAU;
    }
    // -tiny + 2π rounds up to 2π
    if m >= TAU {
        m = 0.0;
    }
    m
}

/// Parameters of the forced system.
///
/// `delta_f` is the amplitude of the forcing on `r`. It is a separate
/// parameter from the declination `delta`, even though both are written
/// with the same letter in the derivation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetlerParams {
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_f: f64,
    pub omega: f64,
}

impl SetlerParams {
    /// RK4 "first case" set. The r-forcing amplitude is not listed there;
    /// 0.5 is the toolkit default.
    pub const CASE_ONE: Self = Self {
        lambda: 1.0,
        beta: 23.0 / 8.0,
        gamma: 8.0 / 3.0,
        delta_f: 0.5,
        omega: 0.5,
    };

    /// Set used for the Lyapunov and bifurcation experiments
    /// (with `r0 = 4.24`).
    pub const CHAOS_STUDY: Self = Self {
        lambda: 1.0,
        beta: 0.5,
        gamma: 0.5,
        delta_f: 0.5,
        omega: 1.0,
    };

    /// Set used for the attractor comparison against Lorenz.
    pub const ATTRACTOR: Self = Self {
        lambda: 0.5,
        beta: 8.0 / 3.0,
        gamma: 28.0 / 3.0,
        delta_f: 10.0,
        omega: 0.1,
    };

    pub fn new(lambda: f64, beta: f64, gamma: f64, delta_f: f64, omega: f64) -> Result<Self> {
        let p = Self {
            lambda,
            beta,
            gamma,
            delta_f,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("lambda", self.lambda)?;
        ensure_finite("beta", self.beta)?;
        ensure_finite("gamma", self.gamma)?;
        ensure_finite("delta_f", self.delta_f)?;
        ensure_finite("omega", self.omega)?;
        Ok(())
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    /// The same parameters with every forcing amplitude set to zero.
    pub fn unforced(self) -> Self {
        Self {
            beta: 0.0,
            gamma: 0.0,
            delta_f: 0.0,
            ..self
        }
    }
}

/// Conversion between a state type and the flat `[f64; 3]` the integrators
/// work on.
pub trait StateVector: Copy {
    fn to_array(self) -> [f64; 3];

    /// Builds a state from components already known to be finite.
    fn from_finite(a: [f64; 3]) -> Self;
}

impl StateVector for [f64; 3] {
    fn to_array(self) -> [f64; 3] {
        self
    }

    fn from_finite(a: [f64; 3]) -> Self {
        a
    }
}

impl StateVector for SphericalState {
    fn to_array(self) -> [f64; 3] {
        SphericalState::to_array(self)
    }

    fn from_finite(a: [f64; 3]) -> Self {
        debug_assert!(a.iter().all(|v| v.is_finite()));
        SphericalState {
            alpha: a[0],
            delta: a[1],
            r: a[2],
        }
    }
}

pub(crate) fn all_finite(a: &[f64; 3]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Euclidean distance, scaled so that huge components do not overflow.
pub fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let m = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let s = [d[0] / m, d[1] / m, d[2] / m];
    m * libm::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2])
}

/// Uniform time grid `t0, t0 + h, ..., t0 + n·h` with `n = floor((t1 - t0) / h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    h: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, h: f64) -> Result<Self> {
        ensure_finite("t0", t0)?;
        ensure_finite("t1", t1)?;
        ensure_finite("h", h)?;
        if !(t1 > t0) {
            return Err(Error::invalid("t1", "must exceed t0"));
        }
        if !(h > 0.0) {
            return Err(Error::invalid("h", "must be positive"));
        }
        if (t1 - t0) / h < 1.0 - 1e-9 {
            return Err(Error::invalid("h", "must not exceed t1 - t0"));
        }
        Ok(Self { t0, t1, h })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of steps. A ratio within 1e-9 of an integer counts as that
    /// integer, so `10 / 0.001` gives 10000 rather than 9999.
    pub fn steps(&self) -> usize {
        let ratio = (self.t1 - self.t0) / self.h;
        let nearest = round(ratio);
        let n = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            floor(ratio)
        };
        n as usize
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.h
    }
}

/// Time-indexed samples of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S = SphericalState> {
    times: Vec<f64>,
    states: Vec<S>,
}

impl<S: Copy> Trajectory<S> {
    pub fn start(t: f64, s: S) -> Self {
        Self {
            times: alloc::vec![t],
            states: alloc::vec![s],
        }
    }

    pub fn with_capacity(t: f64, s: S, capacity: usize) -> Self {
        let mut times = Vec::with_capacity(capacity);
        let mut states = Vec::with_capacity(capacity);
        times.push(t);
        states.push(s);
        Self { times, states }
    }

    /// Appends a sample. Times must be strictly increasing.
    pub fn push(&mut self, t: f64, s: S) -> Result<()> {
        match self.times.last() {
            Some(&last) if t > last => {
                self.times.push(t);
                self.states.push(s);
                Ok(())
            }
            _ => Err(Error::invalid("times", "must be strictly increasing")),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Always false; a trajectory holds at least its initial sample.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> (f64, S) {
        let i = self.times.len() - 1;
        (self.times[i], self.states[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, S)> + '_ {
        self.times.iter().copied().zip(self.states.iter().copied())
    }
}

impl<S: StateVector> Trajectory<S> {
    /// One component of every state, e.g. `component(0)` is `alpha`.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.to_array()[i]).collect()
    }
}
