//! Continuous-time Setler flow and the fixed-step integrators.
//!
//! The integrators are generic over [`VectorField`], so the same RK4 code
//! advances the Setler system, the Lorenz benchmark, and any closure
//! injected by a test.

use libm::{cos, sin};

use crate::error::{Diverged, Error, Result};
use crate::state::{all_finite, SetlerParams, SphericalState, StateVector, TimeGrid, Trajectory};

/// Right-hand side `dy/dτ = F(τ, y)` of a 3-dimensional ODE.
pub trait VectorField {
    fn eval(&self, tau: f64, y: [f64; 3]) -> [f64; 3];
}

impl<F> VectorField for F
where
    F: Fn(f64, [f64; 3]) -> [f64; 3],
{
    fn eval(&self, tau: f64, y: [f64; 3]) -> [f64; 3] {
        self(tau, y)
    }
}

/// Time derivative of a [`SphericalState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub d_alpha: f64,
    pub d_delta: f64,
    pub d_r: f64,
}

/// The forced Setler vector field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetlerField {
    pub params: SetlerParams,
}

impl SetlerField {
    pub fn new(params: SetlerParams) -> Self {
        Self { params }
    }
}

impl VectorField for SetlerField {
    fn eval(&self, tau: f64, y: [f64; 3]) -> [f64; 3] {
        setler_rhs(&self.params, tau, y)
    }
}

/// `(λ sinα cosδ + β sin ωτ, λ cosα sinδ + γ cos ωτ, λ (sinδ cosα)² + δ_f sin ωτ)`.
///
/// The discrete map evaluates exactly this expression with `τ = n`.
#[inline]
pub(crate) fn setler_rhs(p: &SetlerParams, tau: f64, y: [f64; 3]) -> [f64; 3] {
    let [alpha, delta, _] = y;
    let (sa, ca) = (sin(alpha), cos(alpha));
    let (sd, cd) = (sin(delta), cos(delta));
    let phase = p.omega * tau;
    let (sw, cw) = (sin(phase), cos(phase));
    let coupling = sd * ca;
    [
        p.lambda * sa * cd + p.beta * sw,
        p.lambda * ca * sd + p.gamma * cw,
        p.lambda * (coupling * coupling) + p.delta_f * sw,
    ]
}

pub fn vector_field(s: SphericalState, tau: f64, p: &SetlerParams) -> Derivative {
    let [d_alpha, d_delta, d_r] = setler_rhs(p, tau, s.to_array());
    Derivative {
        d_alpha,
        d_delta,
        d_r,
    }
}

#[inline]
fn axpy(y: [f64; 3], a: f64, k: [f64; 3]) -> [f64; 3] {
    [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]]
}

#[inline]
fn scale(h: f64, k: [f64; 3]) -> [f64; 3] {
    [h * k[0], h * k[1], h * k[2]]
}

fn rk4_raw<F: VectorField>(field: &F, tau: f64, h: f64, y: [f64; 3]) -> Option<[f64; 3]> {
    let k1 = scale(h, field.eval(tau, y));
    let k2 = scale(h, field.eval(tau + 0.5 * h, axpy(y, 0.5, k1)));
    let k3 = scale(h, field.eval(tau + 0.5 * h, axpy(y, 0.5, k2)));
    let k4 = scale(h, field.eval(tau + h, axpy(y, 1.0, k3)));
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    let stages_finite = all_finite(&k1) && all_finite(&k2) && all_finite(&k3) && all_finite(&k4);
    (stages_finite && all_finite(&out)).then_some(out)
}

/// One classical RK4 step of size `h` from `(tau, s)`. `h = 0` returns `s`.
pub fn rk4_step<S, F>(field: &F, tau: f64, h: f64, s: S) -> Result<S>
where
    S: StateVector,
    F: VectorField,
{
    if h < 0.0 || !h.is_finite() {
        return Err(Error::invalid("h", "must be finite and non-negative"));
    }
    if h == 0.0 {
        return Ok(s);
    }
    rk4_raw(field, tau, h, s.to_array())
        .map(S::from_finite)
        .ok_or(Error::Diverged { last_finite: tau })
}

/// Explicit Euler bridge `x + Δτ·F(x, τ)`.
pub fn euler_discretize(s: SphericalState, tau: f64, dtau: f64, p: &SetlerParams) -> Result<SphericalState> {
    let y = s.to_array();
    let f = setler_rhs(p, tau, y);
    let out = axpy(y, dtau, f);
    if all_finite(&out) {
        Ok(SphericalState::from_finite(out))
    } else {
        Err(Error::Diverged { last_finite: tau })
    }
}

/// Integrates over `grid` recording every node.
pub fn integrate<S, F>(field: &F, s0: S, grid: &TimeGrid) -> Result<Trajectory<S>, Diverged<Trajectory<S>>>
where
    S: StateVector,
    F: VectorField,
{
    integrate_decimated(field, s0, grid, 1)
}

/// Integrates over `grid`, recording every `every`-th node plus the final
/// one. Stops at the first non-finite state and hands back what was
/// recorded so far.
pub fn integrate_decimated<S, F>(
    field: &F,
    s0: S,
    grid: &TimeGrid,
    every: usize,
) -> Result<Trajectory<S>, Diverged<Trajectory<S>>>
where
    S: StateVector,
    F: VectorField,
{
    let every = every.max(1);
    let n = grid.steps();
    let mut traj = Trajectory::with_capacity(grid.t0(), s0, n / every + 2);
    let mut y = s0.to_array();
    let mut last_t = grid.t0();
    for k in 0..n {
        let tau = grid.time(k);
        match rk4_raw(field, tau, grid.h(), y) {
            Some(next) => y = next,
            None => {
                // keep the last finite state in the partial output
                if traj.last().0 < tau {
                    traj.push(tau, S::from_finite(y)).expect("monotone grid");
                }
                return Err(Diverged {
                    last_finite: tau,
                    partial: traj,
                });
            }
        }
        last_t = grid.time(k + 1);
        if (k + 1) % every == 0 || k + 1 == n {
            traj.push(last_t, S::from_finite(y)).expect("monotone grid");
        }
    }
    debug_assert_eq!(traj.last().0, last_t);
    Ok(traj)
}

/// Integrates the Setler system from a spherical state.
pub fn integrate_setler(
    s0: SphericalState,
    grid: &TimeGrid,
    p: &SetlerParams,
) -> Result<Trajectory, Diverged<Trajectory>> {
    integrate(&SetlerField::new(*p), s0, grid)
}
