//! Separable closed-form solutions obtained by freezing one angle.
//!
//! With `δ = δ₀` frozen, `α(τ) = 2·atan(exp(E(τ)))` where
//! `E = λ cosδ₀ τ − (β/ω) cos ωτ + C₁`. This exactly solves
//! `α' = sinα (λ cosδ₀ + β sin ωτ)`, not the forced equation
//! `α' = λ sinα cosδ₀ + β sin ωτ`; [`closed_form_residual`] measures both.
//! The same holds for δ with `α = α₀` frozen.

use libm::{atan, cos, cosh, exp, fabs, sin};

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature::{integrate_adaptive, QuadratureSettings};
use crate::state::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormParams {
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega: f64,
    /// Forcing amplitude of the r equation (only [`closed_form_r`] uses it).
    pub delta_f: f64,
    pub alpha0: f64,
    pub delta0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ClosedFormParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("omega", self.omega),
            ("delta_f", self.delta_f),
            ("alpha0", self.alpha0),
            ("delta0", self.delta0),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
        ] {
            ensure_finite(name, v)?;
        }
        if self.omega == 0.0 {
            return Err(Error::invalid("omega", "must be non-zero for the closed forms"));
        }
        Ok(())
    }

    fn exponent_alpha(&self, tau: f64) -> f64 {
        self.lambda * cos(self.delta0) * tau - (self.beta / self.omega) * cos(self.omega * tau) + self.c1
    }

    fn exponent_delta(&self, tau: f64) -> f64 {
        self.lambda * cos(self.alpha0) * tau + (self.gamma / self.omega) * sin(self.omega * tau) + self.c2
    }

    fn rate_alpha(&self, tau: f64) -> f64 {
        self.lambda * cos(self.delta0) + self.beta * sin(self.omega * tau)
    }

    fn rate_delta(&self, tau: f64) -> f64 {
        self.lambda * cos(self.alpha0) + self.gamma * cos(self.omega * tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub value: f64,
    /// `exp(E)` overflowed and the angle was saturated to π.
    pub saturated: bool,
}

fn two_atan_exp(e: f64) -> ClosedFormValue {
    let x = exp(e);
    ClosedFormValue {
        value: 2.0 * atan(x),
        saturated: x.is_infinite(),
    }
}

pub fn closed_form_alpha(tau: f64, p: &ClosedFormParams) -> Result<ClosedFormValue> {
    p.validate()?;
    Ok(two_atan_exp(p.exponent_alpha(tau)))
}

pub fn closed_form_delta(tau: f64, p: &ClosedFormParams) -> Result<ClosedFormValue> {
    p.validate()?;
    Ok(two_atan_exp(p.exponent_delta(tau)))
}

/// `r(τ) = C₃ + ∫₀^τ [λ (sin δ(s) cos α(s))² + δ_f sin ωs] ds` with α, δ
/// from the closed forms, by adaptive quadrature.
pub fn closed_form_r(tau: f64, p: &ClosedFormParams, settings: &QuadratureSettings) -> Result<f64> {
    p.validate()?;
    let integrand = |s: f64| {
        let a = two_atan_exp(p.exponent_alpha(s)).value;
        let d = two_atan_exp(p.exponent_delta(s)).value;
        let c = sin(d) * cos(a);
        p.lambda * c * c + p.delta_f * sin(p.omega * s)
    };
    let (lo, hi, sign) = if tau >= 0.0 { (0.0, tau, 1.0) } else { (tau, 0.0, -1.0) };
    Ok(p.c3 + sign * integrate_adaptive(integrand, lo, hi, settings)?.value)
}

/// Which ODE the closed forms are checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualTarget {
    /// `α' = sinα (λ cosδ₀ + β sin ωτ)`, `δ' = sinδ (λ cosα₀ + γ cos ωτ)`.
    Separable,
    /// `α' = λ sinα cosδ₀ + β sin ωτ`, `δ' = λ sinδ cosα₀ + γ cos ωτ`.
    FullForced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_alpha: f64,
    pub max_delta: f64,
    pub max_residual: f64,
    pub evaluated: usize,
    /// Grid points where an angle sits at 0 or π in floating point.
    pub skipped: usize,
}

/// Maximum `|dθ/dτ − rhs|` over the grid nodes, using the exact
/// derivative `2·atan(e^E)' = E'/cosh E`.
pub fn closed_form_residual(p: &ClosedFormParams, grid: &TimeGrid, target: ResidualTarget) -> Result<ResidualReport> {
    p.validate()?;
    let mut rep = ResidualReport {
        max_alpha: 0.0,
        max_delta: 0.0,
        max_residual: 0.0,
        evaluated: 0,
        skipped: 0,
    };
    for k in 0..=grid.steps() {
        let tau = grid.time(k);
        let (ea, ed) = (p.exponent_alpha(tau), p.exponent_delta(tau));
        let (ca, cd) = (cosh(ea), cosh(ed));
        let (xa, xd) = (exp(ea), exp(ed));
        if [xa, xd].iter().any(|x| *x == 0.0 || x.is_infinite()) || ca.is_infinite() || cd.is_infinite() {
            rep.skipped += 1;
            continue;
        }
        let alpha = 2.0 * atan(xa);
        let delta = 2.0 * atan(xd);
        let (ra, rd) = (p.rate_alpha(tau), p.rate_delta(tau));
        let (dalpha, ddelta) = (ra / ca, rd / cd);
        let (rhs_a, rhs_d) = match target {
            ResidualTarget::Separable => (sin(alpha) * ra, sin(delta) * rd),
            ResidualTarget::FullForced => (
                p.lambda * sin(alpha) * cos(p.delta0) + p.beta * sin(p.omega * tau),
                p.lambda * sin(delta) * cos(p.alpha0) + p.gamma * cos(p.omega * tau),
            ),
        };
        rep.max_alpha = rep.max_alpha.max(fabs(dalpha - rhs_a));
        rep.max_delta = rep.max_delta.max(fabs(ddelta - rhs_d));
        rep.evaluated += 1;
    }
    rep.max_residual = rep.max_alpha.max(rep.max_delta);
    Ok(rep)
}
