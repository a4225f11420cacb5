//! F-functional `∫(R + |∇f|²) e^{−f} dV` for a Gaussian density, the
//! quadratic potential `f = |x|²`, and the constant-curvature correction.
//!
//! Each evaluator reports the reference closed form next to a radial
//! quadrature and an importance-sampled Monte-Carlo estimate.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::f64::consts::PI;

use libm::{exp, fabs, pow, sqrt};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::montecarlo::{estimate, McEstimate, McSettings};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre_on, integrate_adaptive, integrate_semi_infinite, QuadratureSettings};

/// Relative gap between reference and computed values that sets
/// [`FunctionalResult::discrepancy_flag`].
pub const DISCREPANCY_TOLERANCE: f64 = 1e-2;

/// Ratio of correction to gradient term above which a warning is raised.
pub const DOMINANCE_RATIO: f64 = 1e6;

const STREAM_GRADIENT: u64 = 0;
const STREAM_CURVATURE: u64 = 1 << 32;

/// Normalised isotropic Gaussian density with variance `σ²` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProfile {
    pub sigma: f64,
    pub center: [f64; 3],
}

impl GaussianProfile {
    pub fn new(sigma: f64) -> Result<Self> {
        let p = Self { sigma, center: [0.0; 3] };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma", "must be positive and finite"));
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("center"));
        }
        Ok(())
    }

    fn amplitude(&self) -> f64 {
        pow(2.0 * PI * self.sigma * self.sigma, -1.5)
    }

    /// Density at distance `r` from the centre.
    pub fn density(&self, r: f64) -> f64 {
        self.amplitude() * exp(-r * r / (2.0 * self.sigma * self.sigma))
    }

    /// `|∇f|²` at distance `r`.
    pub fn grad_sq(&self, r: f64) -> f64 {
        let f = self.density(r);
        let s2 = self.sigma * self.sigma;
        r * r / (s2 * s2) * f * f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySpec {
    /// Constant scalar curvature `R`.
    pub curvature: f64,
    /// Radius of the ball over which non-decaying integrands are taken.
    pub r_max: f64,
    pub quadrature: QuadratureSettings,
    pub mc: McSettings,
    /// Omit the `e^{−f}` weight from the Gaussian gradient term.
    pub drop_exp_f: bool,
}

impl Default for EntropySpec {
    fn default() -> Self {
        Self {
            curvature: 0.0,
            r_max: 10.0,
            quadrature: QuadratureSettings::default(),
            mc: McSettings::default(),
            drop_exp_f: false,
        }
    }
}

impl EntropySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::invalid("r_max", "must be positive and finite"));
        }
        if !self.curvature.is_finite() {
            return Err(Error::NonFinite("curvature"));
        }
        if !(self.quadrature.rel_tol > 0.0) {
            return Err(Error::invalid("quad_rel_tol", "must be positive"));
        }
        self.mc.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalResult {
    /// Reference closed form (plus the computed correction when perturbed).
    pub paper_value: f64,
    pub quadrature_value: f64,
    pub quadrature_error: f64,
    pub mc_value: f64,
    pub mc_stderr: f64,
    pub mc_samples: u64,
    pub discrepancy_flag: bool,
    /// `R·∫e^{−f} dV` over the ball, when a curvature term is present.
    pub correction: Option<f64>,
    pub warnings: Vec<String>,
}

impl FunctionalResult {
    /// `|quadrature − mc|` in units of the MC standard error.
    pub fn mc_z_score(&self) -> f64 {
        fabs(self.quadrature_value - self.mc_value) / self.mc_stderr
    }

    fn new(paper_value: f64, quad: (f64, f64), mc: McEstimate) -> Self {
        let rel = fabs(paper_value - quad.0) / fabs(quad.0);
        FunctionalResult {
            paper_value,
            quadrature_value: quad.0,
            quadrature_error: quad.1,
            mc_value: mc.mean,
            mc_stderr: mc.stderr,
            mc_samples: mc.samples,
            discrepancy_flag: !(rel <= DISCREPANCY_TOLERANCE),
            correction: None,
            warnings: Vec::new(),
        }
    }
}

/// Reference Gaussian result `1/(2π²σ)`.
pub fn gaussian_paper_value(sigma: f64) -> f64 {
    1.0 / (2.0 * PI * PI * sigma)
}

/// Reference quadratic result `π^{3/2}/2`.
pub fn quadratic_paper_value() -> f64 {
    pow(PI, 1.5) / 2.0
}

fn normal3<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> [f64; 3] {
    let mut x = [0.0; 3];
    for xi in x.iter_mut() {
        *xi = scale * rng.sample::<f64, _>(StandardNormal);
    }
    x
}

fn norm_sq(x: &[f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

fn gaussian_gradient_quadrature(g: &GaussianProfile, spec: &EntropySpec) -> Result<(f64, f64)> {
    let integrand = |r: f64| {
        let w = if spec.drop_exp_f { 1.0 } else { exp(-g.density(r)) };
        4.0 * PI * r * r * g.grad_sq(r) * w
    };
    let out = integrate_semi_infinite(integrand, 0.0, g.sigma, &spec.quadrature)?;
    Ok((out.value, out.error_estimate))
}

/// Samples from `N(0, σ²/2)`, whose density is proportional to `f²`, so
/// the weight only carries `r²/σ⁴ · e^{−f}`.
fn gaussian_gradient_mc<E: Executor>(exec: &E, g: &GaussianProfile, spec: &EntropySpec) -> Result<McEstimate> {
    let s = g.sigma;
    let proposal_amp = pow(PI * s * s, -1.5);
    let a = g.amplitude();
    let ratio = a * a / proposal_amp;
    let drop = spec.drop_exp_f;
    estimate(exec, &spec.mc, STREAM_GRADIENT, move |rng| {
        let x = normal3(rng, s / sqrt(2.0));
        let r2 = norm_sq(&x);
        let f = a * exp(-r2 / (2.0 * s * s));
        let w = if drop { 1.0 } else { exp(-f) };
        ratio * r2 / (s * s * s * s) * w
    })
}

fn ball_quadrature(g: &GaussianProfile, spec: &EntropySpec) -> Result<(f64, f64)> {
    let out = integrate_adaptive(|r| 4.0 * PI * r * r * exp(-g.density(r)), 0.0, spec.r_max, &spec.quadrature)?;
    Ok((out.value, out.error_estimate))
}

/// `∫_{|x|<r_max} e^{−f} dV` by uniform sampling of the enclosing cube.
fn ball_mc<E: Executor>(exec: &E, g: &GaussianProfile, spec: &EntropySpec) -> Result<McEstimate> {
    let rm = spec.r_max;
    let volume = 8.0 * rm * rm * rm;
    let g = *g;
    estimate(exec, &spec.mc, STREAM_CURVATURE, move |rng| {
        let x: [f64; 3] = core::array::from_fn(|_| rng.random_range(-rm..rm));
        let r2 = norm_sq(&x);
        if r2 < rm * rm {
            volume * exp(-g.density(sqrt(r2)))
        } else {
            0.0
        }
    })
}

pub fn f_functional_gaussian(g: &GaussianProfile, spec: &EntropySpec) -> Result<FunctionalResult> {
    f_functional_gaussian_with(&Sequential, g, spec)
}

/// Gradient term only; any curvature in `spec` is ignored (see
/// [`f_functional_perturbed`]).
pub fn f_functional_gaussian_with<E: Executor>(exec: &E, g: &GaussianProfile, spec: &EntropySpec) -> Result<FunctionalResult> {
    g.validate()?;
    spec.validate()?;
    let quad = gaussian_gradient_quadrature(g, spec)?;
    let mc = gaussian_gradient_mc(exec, g, spec)?;
    Ok(FunctionalResult::new(gaussian_paper_value(g.sigma), quad, mc))
}

pub fn f_functional_perturbed(g: &GaussianProfile, spec: &EntropySpec) -> Result<FunctionalResult> {
    f_functional_perturbed_with(&Sequential, g, spec)
}

/// Gaussian gradient term plus `R·∫_{|x|<r_max} e^{−f} dV`.
pub fn f_functional_perturbed_with<E: Executor>(exec: &E, g: &GaussianProfile, spec: &EntropySpec) -> Result<FunctionalResult> {
    let mut out = f_functional_gaussian_with(exec, g, spec)?;
    let r = spec.curvature;
    if r == 0.0 {
        return Ok(out);
    }
    let (ball, ball_err) = ball_quadrature(g, spec)?;
    let ball_mc = ball_mc(exec, g, spec)?;
    let correction = r * ball;
    let gradient = out.quadrature_value;
    out.paper_value += correction;
    out.quadrature_value += correction;
    out.quadrature_error += fabs(r) * ball_err;
    out.mc_value += r * ball_mc.mean;
    out.mc_stderr = sqrt(out.mc_stderr * out.mc_stderr + r * r * ball_mc.stderr * ball_mc.stderr);
    out.mc_samples += ball_mc.samples;
    out.discrepancy_flag = !(fabs(out.paper_value - out.quadrature_value) / fabs(out.quadrature_value) <= DISCREPANCY_TOLERANCE);
    out.correction = Some(correction);
    if fabs(correction) > DOMINANCE_RATIO * fabs(gradient) {
        out.warnings.push(format!(
            "curvature term {correction:e} exceeds the gradient term {gradient:e} by more than {DOMINANCE_RATIO:e}; the perturbation is not small"
        ));
    }
    Ok(out)
}

pub fn f_functional_quadratic(spec: &EntropySpec) -> Result<FunctionalResult> {
    f_functional_quadratic_with(&Sequential, spec)
}

/// `f = |x|²`: `∫ 4|x|² e^{−|x|²} dV` over R³.
pub fn f_functional_quadratic_with<E: Executor>(exec: &E, spec: &EntropySpec) -> Result<FunctionalResult> {
    spec.validate()?;
    let out = integrate_semi_infinite(|r| 16.0 * PI * r * r * r * r * exp(-r * r), 0.0, 1.0, &spec.quadrature)?;
    // N(0, 1/2) has density π^{-3/2} e^{-|x|²}
    let norm = pow(PI, 1.5);
    let mc = estimate(exec, &spec.mc, STREAM_GRADIENT, move |rng| {
        let x = normal3(rng, sqrt(0.5));
        4.0 * norm_sq(&x) * norm
    })?;
    Ok(FunctionalResult::new(quadratic_paper_value(), (out.value, out.error_estimate), mc))
}

/// Quadratic integrand on a Cartesian Gauss–Legendre grid over
/// `[-half_width, half_width]³` with `n` nodes per axis.
pub fn quadratic_tensor_grid(n: usize, half_width: f64) -> f64 {
    let (x, w) = gauss_legendre_on(n, -half_width, half_width);
    let gx: Vec<f64> = x.iter().map(|x| exp(-x * x)).collect();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r2 = x[i] * x[i] + x[j] * x[j] + x[k] * x[k];
                total += w[i] * w[j] * w[k] * 4.0 * r2 * gx[i] * gx[j] * gx[k];
            }
        }
    }
    total
}

/// Quadratic radial integrand `16π r⁴ e^{−r²}` on `[0, r_max]` with a
/// composite Gauss–Legendre rule of `panels` 8-point panels.
pub fn quadratic_radial_composite(panels: usize, r_max: f64) -> f64 {
    composite_gauss_legendre(|r| 16.0 * PI * r * r * r * r * exp(-r * r), 0.0, r_max, panels, 8)
}
