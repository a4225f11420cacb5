//! Largest-Lyapunov-exponent estimators.
//!
//! [`lyapunov_1d`] averages `log|f'(x)|` along a scalar orbit. The
//! two-trajectory estimators follow a reference orbit and a companion
//! displaced by `d0`, renormalising the separation back to `d0` every
//! `renorm_every` steps.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{fabs, log, sqrt};

use crate::continuous::{SetlerField, VectorField};
use crate::discrete::forced_step;
use crate::error::{Error, Result};
use crate::state::{distance, SetlerParams, SphericalState, StateVector, TimeGrid};

/// Smallest `|f'(x)|` fed to the logarithm.
pub const DERIVATIVE_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub exponent: f64,
    /// Number of log terms (orbit points or renormalisation windows) averaged.
    pub terms: usize,
    pub warnings: Vec<String>,
}

/// A scalar map `x -> f(x, a)` with an optional analytic derivative.
///
/// Without one, the derivative is a central difference with step
/// `fd_step · max(1, |x|)`.
#[derive(Clone, Copy)]
pub struct ScalarMap<F, D = fn(f64, f64) -> f64> {
    map: F,
    derivative: Option<D>,
    fd_step: f64,
}

impl<F: Fn(f64, f64) -> f64> ScalarMap<F> {
    pub fn new(map: F) -> Self {
        ScalarMap {
            map,
            derivative: None,
            fd_step: 1e-6,
        }
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }
}

impl<F: Fn(f64, f64) -> f64, D: Fn(f64, f64) -> f64> ScalarMap<F, D> {
    pub fn with_derivative<D2: Fn(f64, f64) -> f64>(self, derivative: D2) -> ScalarMap<F, D2> {
        ScalarMap {
            map: self.map,
            derivative: Some(derivative),
            fd_step: self.fd_step,
        }
    }

    pub fn apply(&self, x: f64, a: f64) -> f64 {
        (self.map)(x, a)
    }

    pub fn slope(&self, x: f64, a: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(x, a),
            None => {
                let h = self.fd_step * fabs(x).max(1.0);
                ((self.map)(x + h, a) - (self.map)(x - h, a)) / (2.0 * h)
            }
        }
    }
}

/// The logistic map `a x (1 - x)` with its analytic derivative.
pub fn logistic() -> ScalarMap<fn(f64, f64) -> f64> {
    fn map(x: f64, a: f64) -> f64 {
        a * x * (1.0 - x)
    }
    fn slope(x: f64, a: f64) -> f64 {
        a * (1.0 - 2.0 * x)
    }
    ScalarMap::new(map as fn(f64, f64) -> f64).with_derivative(slope as fn(f64, f64) -> f64)
}

/// Iterates `n` steps from `x0` and averages `log|f'(x_k)|` over
/// `k = tr..n`.
pub fn lyapunov_1d<F, D>(map: &ScalarMap<F, D>, x0: f64, a: f64, n: usize, tr: usize) -> Result<LyapunovEstimate>
where
    F: Fn(f64, f64) -> f64,
    D: Fn(f64, f64) -> f64,
{
    if n <= tr {
        return Err(Error::invalid("iterations", "must exceed the transient"));
    }
    let mut x = x0;
    // running mean, so equal terms average to exactly that term
    let mut mean = 0.0;
    let mut count = 0usize;
    let mut floored = 0usize;
    let mut first_floor = None;
    for k in 0..n {
        if !x.is_finite() {
            return Err(Error::Diverged { last_finite: k as f64 });
        }
        if k >= tr {
            let d = fabs(map.slope(x, a));
            if !d.is_finite() {
                return Err(Error::NonFinite("map derivative"));
            }
            if d < DERIVATIVE_FLOOR {
                floored += 1;
                first_floor.get_or_insert(k);
            }
            count += 1;
            mean += (log(d.max(DERIVATIVE_FLOOR)) - mean) / count as f64;
        }
        x = map.apply(x, a);
    }
    let mut warnings = Vec::new();
    if let Some(k) = first_floor {
        warnings.push(format!(
            "derivative vanished at {floored} orbit point(s), first at step {k}; floored at {DERIVATIVE_FLOOR:e}"
        ));
    }
    Ok(LyapunovEstimate {
        exponent: mean,
        terms: count,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTrajectorySettings {
    pub d0: f64,
    pub renorm_every: usize,
    /// Steps integrated before the estimate starts accumulating.
    pub transient_steps: usize,
}

impl Default for TwoTrajectorySettings {
    fn default() -> Self {
        Self {
            d0: 1e-8,
            renorm_every: 10,
            transient_steps: 0,
        }
    }
}

impl TwoTrajectorySettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(Error::invalid("d0", "must be positive and finite"));
        }
        if self.renorm_every == 0 {
            return Err(Error::invalid("renorm_every", "must be at least 1"));
        }
        Ok(())
    }
}

fn displaced(y: [f64; 3], d0: f64) -> [f64; 3] {
    let e = d0 / sqrt(3.0);
    [y[0] + e, y[1] + e, y[2] + e]
}

/// Shared renormalisation loop. `step(k, y)` advances one step from step
/// index `k`; `dt` converts steps into time.
fn benettin<St>(y0: [f64; 3], total: usize, dt: f64, settings: &TwoTrajectorySettings, step: St) -> Result<LyapunovEstimate>
where
    St: Fn(usize, [f64; 3]) -> Result<[f64; 3]>,
{
    settings.validate()?;
    let m = settings.renorm_every;
    if total < settings.transient_steps + m {
        return Err(Error::invalid("grid", "too short for one renormalisation window"));
    }
    let mut y = y0;
    for k in 0..settings.transient_steps {
        y = step(k, y)?;
    }
    let mut z = displaced(y, settings.d0);
    let mut sum = 0.0;
    let mut windows = 0usize;
    let mut warnings = Vec::new();
    let mut k = settings.transient_steps;
    while k + m <= total {
        for _ in 0..m {
            y = step(k, y)?;
            z = step(k, z)?;
            k += 1;
        }
        let d = distance(&y, &z);
        if d == 0.0 {
            // orbits merged in floating point; restart the companion
            warnings.push(format!("separation collapsed to zero in window {windows}"));
            sum += log(DERIVATIVE_FLOOR);
            z = displaced(y, settings.d0);
        } else {
            sum += log(d / settings.d0);
            let s = settings.d0 / d;
            z = [y[0] + (z[0] - y[0]) * s, y[1] + (z[1] - y[1]) * s, y[2] + (z[2] - y[2]) * s];
        }
        windows += 1;
    }
    Ok(LyapunovEstimate {
        exponent: sum / (windows as f64 * m as f64 * dt),
        terms: windows,
        warnings,
    })
}

/// Two-trajectory estimate for a continuous field integrated with RK4.
pub fn lyapunov_two_trajectory<F: VectorField, S: StateVector>(
    field: &F,
    s0: S,
    grid: &TimeGrid,
    settings: &TwoTrajectorySettings,
) -> Result<LyapunovEstimate> {
    let h = grid.h();
    benettin(s0.to_array(), grid.steps(), h, settings, |k, y| {
        crate::continuous::rk4_step(field, grid.time(k), h, y)
    })
}

/// Two-trajectory estimate for the continuous Setler flow.
pub fn lyapunov_setler(
    p: &SetlerParams,
    s0: SphericalState,
    grid: &TimeGrid,
    settings: &TwoTrajectorySettings,
) -> Result<LyapunovEstimate> {
    lyapunov_two_trajectory(&SetlerField::new(*p), s0, grid, settings)
}

/// Two-trajectory estimate for the forced discrete map over `n_steps`
/// iterations (unit time step).
pub fn lyapunov_map_two_trajectory(
    p: &SetlerParams,
    s0: SphericalState,
    n_steps: usize,
    settings: &TwoTrajectorySettings,
) -> Result<LyapunovEstimate> {
    benettin(s0.to_array(), n_steps, 1.0, settings, |k, y| {
        forced_step(SphericalState::from_finite(y), p, k as u64).map(|s| s.to_array())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::LN_2;

    #[test]
    fn logistic_at_four_is_ln2() {
        let est = lyapunov_1d(&logistic(), 0.3, 4.0, 100_000, 1_000).unwrap();
        assert!((est.exponent - LN_2).abs() < 0.01, "{}", est.exponent);
        assert_eq!(est.terms, 99_000);
    }

    #[test]
    fn constant_slope_maps() {
        let half = ScalarMap::new(|x: f64, _a: f64| 0.5 * x);
        let est = lyapunov_1d(&half, 1.0, 0.0, 200, 10).unwrap();
        assert!((est.exponent + LN_2).abs() < 1e-9);
        assert_eq!(est.terms, 190);

        let exact = half.with_derivative(|_x: f64, _a: f64| 0.5);
        let est = lyapunov_1d(&exact, 1.0, 0.0, 200, 10).unwrap();
        assert_eq!(est.exponent, libm::log(0.5));

        let id = ScalarMap::new(|x: f64, _a: f64| x).with_derivative(|_x: f64, _a: f64| 1.0);
        assert_eq!(lyapunov_1d(&id, 0.7, 0.0, 50, 0).unwrap().exponent, 0.0);
    }

    #[test]
    fn zero_derivative_is_floored_with_warning() {
        // x = 0.5 is the logistic critical point and maps to a fixed point
        // orbit 0.5 -> 1 -> 0 -> 0 ...
        let est = lyapunov_1d(&logistic(), 0.5, 4.0, 10, 0).unwrap();
        assert_eq!(est.warnings.len(), 1);
        assert!(est.exponent < -60.0);
    }

    #[test]
    fn transient_must_be_shorter_than_run() {
        assert!(lyapunov_1d(&logistic(), 0.3, 4.0, 10, 10).is_err());
    }

    #[test]
    fn contracting_field() {
        let field = |_t: f64, y: [f64; 3]| [-y[0], -y[1], -y[2]];
        let grid = TimeGrid::new(0.0, 20.0, 0.01).unwrap();
        let est = lyapunov_two_trajectory(&field, [1.0, 2.0, 3.0], &grid, &Default::default()).unwrap();
        assert!((est.exponent + 1.0).abs() < 0.05, "{}", est.exponent);
        assert_eq!(est.terms, 200);
    }

    #[test]
    fn settings_are_validated() {
        let field = |_t: f64, y: [f64; 3]| y;
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        for bad in [
            TwoTrajectorySettings { d0: 0.0, ..Default::default() },
            TwoTrajectorySettings { renorm_every: 0, ..Default::default() },
            TwoTrajectorySettings { renorm_every: 1000, ..Default::default() },
        ] {
            assert!(lyapunov_two_trajectory(&field, [1.0; 3], &grid, &bad).is_err());
        }
    }

    #[test]
    fn blow_up_is_an_error() {
        let field = |_t: f64, y: [f64; 3]| [y[0] * y[0], 0.0, 0.0];
        let grid = TimeGrid::new(0.0, 5.0, 0.01).unwrap();
        let err = lyapunov_two_trajectory(&field, [1.0, 0.0, 0.0], &grid, &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
    }
}
