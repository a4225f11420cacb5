//! Least-squares fits of `c₁e^{κ₁τ} + c₂e^{κ₂τ}`.
//!
//! For fixed rates the amplitudes solve a linear problem, so only
//! `(κ₁, κ₂)` is searched (variable projection) with Nelder–Mead.
//! Residuals are relative, which keeps a fast-growing tail from
//! swamping its early points.

use alloc::vec::Vec;

use libm::{exp, fabs, log, sqrt};

use crate::error::{Error, Result};

pub const MIN_TAIL_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit {
    pub c1: f64,
    pub kappa1: f64,
    pub c2: f64,
    pub kappa2: f64,
    /// RMS relative residual over the fitted tail.
    pub residual: f64,
    /// `-1.0` when the tail was negative and its magnitude was fitted.
    pub sign: f64,
}

impl AsymptoticFit {
    /// A fit with given constants, rates sorted so that `κ₁ ≥ κ₂`.
    pub fn new(c1: f64, kappa1: f64, c2: f64, kappa2: f64) -> Result<Self> {
        for (name, v) in [("c1", c1), ("kappa1", kappa1), ("c2", c2), ("kappa2", kappa2)] {
            crate::error::ensure_finite(name, v)?;
        }
        let (c1, kappa1, c2, kappa2) = if kappa1 >= kappa2 {
            (c1, kappa1, c2, kappa2)
        } else {
            (c2, kappa2, c1, kappa1)
        };
        Ok(Self {
            c1,
            kappa1,
            c2,
            kappa2,
            residual: 0.0,
            sign: 1.0,
        })
    }

    /// `sign·(c₁e^{κ₁τ} + c₂e^{κ₂τ})`.
    pub fn value(&self, tau: f64) -> f64 {
        self.sign * (self.c1 * exp(self.kappa1 * tau) + self.c2 * exp(self.kappa2 * tau))
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        self.sign * (self.c1 * self.kappa1 * exp(self.kappa1 * tau) + self.c2 * self.kappa2 * exp(self.kappa2 * tau))
    }

    pub fn is_single(&self) -> bool {
        self.c2 == 0.0
    }
}

struct Tail {
    t: Vec<f64>,
    y: Vec<f64>,
}

/// Amplitudes and objective for fixed rates on shifted time.
fn project(tail: &Tail, k1: f64, k2: f64) -> Option<(f64, f64, f64)> {
    let (mut aa, mut ab, mut bb, mut a1, mut b1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, y) in tail.t.iter().zip(&tail.y) {
        let a = exp(k1 * t) / y;
        let b = exp(k2 * t) / y;
        aa += a * a;
        ab += a * b;
        bb += b * b;
        a1 += a;
        b1 += b;
    }
    let det = aa * bb - ab * ab;
    if !(det.is_finite() && det > 1e-12 * aa * bb) {
        return None;
    }
    let c1 = (a1 * bb - b1 * ab) / det;
    let c2 = (b1 * aa - a1 * ab) / det;
    let rms = rms_relative(tail, |t| c1 * exp(k1 * t) + c2 * exp(k2 * t));
    rms.is_finite().then_some((c1, c2, rms))
}

fn rms_relative<M: Fn(f64) -> f64>(tail: &Tail, model: M) -> f64 {
    let ss: f64 = tail
        .t
        .iter()
        .zip(&tail.y)
        .map(|(t, y)| {
            let r = (model(*t) - y) / y;
            r * r
        })
        .sum();
    sqrt(ss / tail.t.len() as f64)
}

/// Ordinary least squares slope and intercept of `ys` on `xs`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: &F, start: [f64; 2], step: f64) -> ([f64; 2], f64) {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut vals = simplex.map(&f);
    for _ in 0..4000 {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        let (b, m, w) = (idx[0], idx[1], idx[2]);
        let spread = fabs(vals[w] - vals[b]);
        let size = fabs(simplex[w][0] - simplex[b][0]) + fabs(simplex[w][1] - simplex[b][1]);
        if (spread <= 1e-15 * (1.0 + fabs(vals[b])) && size < 1e-10) || size < 1e-13 {
            break;
        }
        let centroid = [0.5 * (simplex[b][0] + simplex[m][0]), 0.5 * (simplex[b][1] + simplex[m][1])];
        let along = |c: f64| {
            [centroid[0] + c * (simplex[w][0] - centroid[0]), centroid[1] + c * (simplex[w][1] - centroid[1])]
        };
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < vals[b] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                simplex[w] = xe;
                vals[w] = fe;
            } else {
                simplex[w] = xr;
                vals[w] = fr;
            }
        } else if fr < vals[m] {
            simplex[w] = xr;
            vals[w] = fr;
        } else {
            let xc = if fr < vals[w] { along(-0.5) } else { along(0.5) };
            let fc = f(xc);
            if fc < vals[w].min(fr) {
                simplex[w] = xc;
                vals[w] = fc;
            } else {
                for i in [m, w] {
                    simplex[i] = [
                        simplex[b][0] + 0.5 * (simplex[i][0] - simplex[b][0]),
                        simplex[b][1] + 0.5 * (simplex[i][1] - simplex[b][1]),
                    ];
                    vals[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("three vertices");
    (simplex[best], vals[best])
}

/// Fits the last `tail_fraction` of `(times, values)`.
///
/// The tail must be all positive or all negative; a negative tail is
/// fitted by magnitude with `sign = -1`. The single exponential is kept
/// unless a two-term fit at least halves the residual with distinct
/// rates and finite amplitudes.
pub fn fit_asymptotic(times: &[f64], values: &[f64], tail_fraction: f64) -> Result<AsymptoticFit> {
    if times.len() != values.len() {
        return Err(Error::invalid("series", "times and values differ in length"));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::invalid("tail_fraction", "must be in (0, 1]"));
    }
    let n = times.len();
    let take = libm::ceil(tail_fraction * n as f64) as usize;
    if take < MIN_TAIL_POINTS {
        return Err(Error::invalid("series", "fewer than 20 points in the fitted tail"));
    }
    let (t_raw, y_raw) = (&times[n - take..], &values[n - take..]);
    if !t_raw.iter().chain(y_raw).all(|x| x.is_finite()) {
        return Err(Error::NonFinite("series"));
    }
    let sign = if y_raw.iter().all(|&y| y > 0.0) {
        1.0
    } else if y_raw.iter().all(|&y| y < 0.0) {
        -1.0
    } else {
        return Err(Error::Fit("tail is not of one strict sign"));
    };
    let t0 = t_raw[0];
    let tail = Tail {
        t: t_raw.iter().map(|t| t - t0).collect(),
        y: y_raw.iter().map(|y| y * sign).collect(),
    };

    let logs: Vec<f64> = tail.y.iter().map(|&y| log(y)).collect();
    let (k_single, ln_c) = ols(&tail.t, &logs);
    let c_single = exp(ln_c);
    let r1 = rms_relative(&tail, |t| c_single * exp(k_single * t));

    let span = tail.t[tail.t.len() - 1].max(f64::MIN_POSITIVE);
    let objective = |k: [f64; 2]| project(&tail, k[0], k[1]).map_or(f64::INFINITY, |r| r.2);
    let scale = 1.0 / span;
    let starts = [
        [k_single + scale, k_single - scale],
        [k_single + 5.0 * scale, k_single - 5.0 * scale],
        [k_single, k_single - 20.0 * scale],
        [k_single + 20.0 * scale, k_single],
    ];
    let mut best: Option<([f64; 2], f64)> = None;
    for s in starts {
        let (k, v) = nelder_mead(&objective, s, 2.0 * scale);
        if v.is_finite() && best.is_none_or(|b| v < b.1) {
            best = Some((k, v));
        }
    }

    let single = |res: f64| AsymptoticFit {
        c1: c_single * exp(-k_single * t0),
        kappa1: k_single,
        c2: 0.0,
        kappa2: k_single,
        residual: res,
        sign,
    };
    let Some((k, r2)) = best else {
        return Ok(single(r1));
    };
    let Some((c1, c2, _)) = project(&tail, k[0], k[1]) else {
        return Ok(single(r1));
    };
    let distinct = fabs(k[0] - k[1]) > 1e-6 * scale;
    if !(r2 < 0.5 * r1 && r1 > 1e-9 && distinct && c1 != 0.0 && c2 != 0.0) {
        return Ok(single(r1));
    }
    let (a1, a2) = (c1 * exp(-k[0] * t0), c2 * exp(-k[1] * t0));
    if !(a1.is_finite() && a2.is_finite()) {
        return Ok(single(r1));
    }
    let mut fit = AsymptoticFit::new(a1, k[0], a2, k[1])?;
    fit.residual = r2;
    fit.sign = sign;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(n: usize, dt: f64, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let y = t.iter().map(|&t| f(t)).collect();
        (t, y)
    }

    #[test]
    fn single_exponential() {
        let (t, y) = series(50, 1.0, |t| 2.0 * exp(0.5 * t));
        let fit = fit_asymptotic(&t, &y, 1.0).unwrap();
        assert!((fit.c1 / 2.0 - 1.0).abs() < 1e-2, "{fit:?}");
        assert!((fit.kappa1 / 0.5 - 1.0).abs() < 1e-2);
        assert!(fit.is_single());
    }

    #[test]
    fn constant_series() {
        let (t, y) = series(40, 0.5, |_| 7.25);
        let fit = fit_asymptotic(&t, &y, 1.0).unwrap();
        assert!(fit.kappa1.abs() < 1e-6);
        assert!((fit.c1 - 7.25).abs() < 1e-9);
    }

    #[test]
    fn two_term_recovery() {
        let (t, y) = series(201, 0.1, |t| 2.0 * exp(0.5 * t) + 3.0 * exp(-0.2 * t));
        let fit = fit_asymptotic(&t, &y, 1.0).unwrap();
        assert!(!fit.is_single(), "{fit:?}");
        assert!((fit.c1 / 2.0 - 1.0).abs() < 0.05, "{fit:?}");
        assert!((fit.kappa1 / 0.5 - 1.0).abs() < 0.05, "{fit:?}");
        assert!((fit.c2 / 3.0 - 1.0).abs() < 0.05, "{fit:?}");
        assert!((fit.kappa2 / -0.2 - 1.0).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn negative_tail_is_fitted_by_magnitude() {
        let (t, y) = series(30, 1.0, |t| -4.0 * exp(0.1 * t));
        let fit = fit_asymptotic(&t, &y, 1.0).unwrap();
        assert_eq!(fit.sign, -1.0);
        assert!((fit.c1 - 4.0).abs() < 1e-9);
        assert!((fit.value(2.0) + 4.0 * exp(0.2)).abs() < 1e-9);
    }

    #[test]
    fn tail_fraction_uses_the_end() {
        let (t, y) = series(100, 1.0, |t| if t < 50.0 { -1.0 } else { exp(0.2 * t) });
        let fit = fit_asymptotic(&t, &y, 0.3).unwrap();
        assert!((fit.kappa1 - 0.2).abs() < 1e-9);
        assert!((fit.c1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bad_inputs() {
        let (t, y) = series(19, 1.0, |t| exp(t));
        assert!(fit_asymptotic(&t, &y, 1.0).is_err());
        let (t, y) = series(30, 1.0, |t| t - 10.0);
        assert!(matches!(fit_asymptotic(&t, &y, 1.0), Err(Error::Fit(_))));
        let (t, y) = series(30, 1.0, |_| 0.0);
        assert!(fit_asymptotic(&t, &y, 1.0).is_err());
        let (t, y) = series(30, 1.0, |t| exp(t));
        assert!(fit_asymptotic(&t, &y, 0.0).is_err());
    }

    #[test]
    fn rates_are_sorted() {
        let f = AsymptoticFit::new(1.0, -0.5, 2.0, 0.3).unwrap();
        assert_eq!((f.c1, f.kappa1, f.c2, f.kappa2), (2.0, 0.3, 1.0, -0.5));
        assert!((f.derivative(0.0) - (0.6 - 0.5)).abs() < 1e-15);
    }
}
