//! One-dimensional quadrature: globally adaptive Gauss–Kronrod (7/15),
//! a semi-infinite variant via `x = a + s·t/(1 - t)`, and Gauss–Legendre
//! rules for fixed tensor-product grids.

use alloc::vec::Vec;

use libm::cos;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

// Kronrod nodes on [0, 1); odd indices are the embedded Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<QuadratureOutcome> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("interval", "endpoints must be finite"));
    }
    if a == b {
        return Ok(QuadratureOutcome {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    let mut segments = alloc::vec![gk15(&f, a, b)];
    loop {
        let (value, error) = segments
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if !value.is_finite() {
            return Err(Error::NonFinite("integrand"));
        }
        if error <= settings.abs_tol.max(settings.rel_tol * value.abs()) {
            return Ok(QuadratureOutcome {
                value,
                error_estimate: error,
                intervals: segments.len(),
            });
        }
        if segments.len() >= settings.max_intervals {
            return Err(Error::Quadrature { achieved: error });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            // interval cannot be split further in floating point
            return Err(Error::Quadrature { achieved: error });
        }
        segments.push(gk15(&f, s.a, mid));
        segments.push(gk15(&f, mid, s.b));
    }
}

/// Integrates `f` over `[a, ∞)` using `x = a + scale·t/(1 - t)`.
///
/// `scale` should be the length over which `f` varies (e.g. a Gaussian
/// width); it only affects efficiency.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    settings: &QuadratureSettings,
) -> Result<QuadratureOutcome> {
    if !(scale > 0.0) {
        return Err(Error::invalid("scale", "must be positive"));
    }
    let mapped = |t: f64| {
        let one_minus = 1.0 - t;
        let x = a + scale * t / one_minus;
        let jac = scale / (one_minus * one_minus);
        let v = f(x);
        // f is expected to decay; a zero value times an infinite Jacobian is zero
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    };
    integrate_adaptive(mapped, 0.0, 1.0, settings)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut x, mut w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for (xi, wi) in x.iter_mut().zip(w.iter_mut()) {
        *xi = mid + half * *xi;
        *wi *= half;
    }
    (x, w)
}

/// Composite rule: `panels` equal panels on `[a, b]`, each with an
/// `order`-point Gauss–Legendre rule.
pub fn composite_gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let mut panel = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            panel += wi * f(mid + 0.5 * width * xi);
        }
        total += panel * 0.5 * width;
    }
    total
}
