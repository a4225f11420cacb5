//! W-functional of a spatially constant potential `f(τ)` taken from an
//! exponential fit, over the ball `|x| < r_max`.
//!
//! `|∇f|²` is read as `(df/dτ)²`. Because the integrand factor does not
//! depend on `r`, `W = (r_max³/3)·(τ(R + g²) + f − 3)·e^{−f}`; the radial
//! integral is also evaluated by quadrature as a cross-check.

use alloc::vec::Vec;

use libm::{exp, log};

use crate::analysis::fit::{ols, AsymptoticFit};
use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

use super::functional::EntropySpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WEvaluation {
    pub tau: f64,
    pub w: f64,
    pub quadrature_w: f64,
    pub f: f64,
    pub dfdtau: f64,
    /// `e^{−f}` underflowed and `W` was set to zero.
    pub suppressed: bool,
}

pub fn w_functional(fit: &AsymptoticFit, tau: f64, spec: &EntropySpec) -> Result<WEvaluation> {
    if !(spec.r_max > 0.0 && spec.r_max.is_finite()) {
        return Err(Error::invalid("r_max", "must be positive and finite"));
    }
    let f = fit.value(tau);
    let g = fit.derivative(tau);
    let weight = exp(-f);
    if weight == 0.0 {
        return Ok(WEvaluation {
            tau,
            w: 0.0,
            quadrature_w: 0.0,
            f,
            dfdtau: g,
            suppressed: true,
        });
    }
    let factor = (tau * (spec.curvature + g * g) + f - 3.0) * weight;
    if !factor.is_finite() {
        return Err(Error::NonFinite("W integrand"));
    }
    let rm = spec.r_max;
    let w = rm * rm * rm / 3.0 * factor;
    let quadrature_w = integrate_adaptive(|r| r * r * factor, 0.0, rm, &spec.quadrature)?.value;
    Ok(WEvaluation {
        tau,
        w,
        quadrature_w,
        f,
        dfdtau: g,
        suppressed: false,
    })
}

pub fn w_series(fit: &AsymptoticFit, taus: &[f64], spec: &EntropySpec) -> Result<Vec<WEvaluation>> {
    taus.iter().map(|&t| w_functional(fit, t, spec)).collect()
}

/// The `(τ, W)` points where `f(τ) < 1`, before `e^{−f}` takes over.
pub fn pre_suppression_window(series: &[WEvaluation]) -> Vec<(f64, f64)> {
    series.iter().filter(|e| e.f < 1.0).map(|e| (e.tau, e.w)).collect()
}

/// Least-squares slope of `ln W` against `τ`.
pub fn entropy_growth_rate(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::invalid("w_series", "needs at least two points"));
    }
    if points.iter().any(|(_, w)| !(*w > 0.0)) {
        return Err(Error::Fit("W is not positive over the window"));
    }
    let (t, lw): (Vec<f64>, Vec<f64>) = points.iter().map(|&(t, w)| (t, log(w))).unzip();
    let (slope, _) = ols(&t, &lw);
    if !slope.is_finite() {
        return Err(Error::NonFinite("growth rate"));
    }
    Ok(slope)
}
