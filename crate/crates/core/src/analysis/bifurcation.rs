//! λ sweeps of the forced discrete map.
//!
//! The recorded observable is wrapped right ascension `α mod 2π`.

use alloc::vec::Vec;

use libm::sqrt;

use crate::discrete::forced_step;
use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::state::{wrap_angle, SetlerParams, SphericalState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationSettings {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    pub transient: usize,
    pub keep: usize,
}

impl Default for BifurcationSettings {
    fn default() -> Self {
        Self {
            lambda_min: 0.5,
            lambda_max: 1.5,
            n_lambda: 1000,
            transient: 500,
            keep: 200,
        }
    }
}

impl BifurcationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min.is_finite() && self.lambda_max.is_finite()) {
            return Err(Error::invalid("lambda_min/lambda_max", "must be finite"));
        }
        if self.lambda_min > self.lambda_max {
            return Err(Error::invalid("lambda_min", "must not exceed lambda_max"));
        }
        if self.n_lambda < 2 {
            return Err(Error::invalid("n_lambda", "must be at least 2"));
        }
        if self.keep == 0 {
            return Err(Error::invalid("keep", "must be at least 1"));
        }
        Ok(())
    }

    /// Uniform grid whose endpoints are exactly `lambda_min` and `lambda_max`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.n_lambda;
        let step = (self.lambda_max - self.lambda_min) / (n - 1) as f64;
        let mut g: Vec<f64> = (0..n).map(|i| self.lambda_min + i as f64 * step).collect();
        g[n - 1] = self.lambda_max;
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationData {
    pub param_values: Vec<f64>,
    /// Wrapped α samples per λ; empty where the orbit diverged.
    pub samples: Vec<Vec<f64>>,
    pub diverged: Vec<bool>,
}

impl BifurcationData {
    /// Sample standard deviation of each column.
    pub fn dispersion(&self) -> Vec<Option<f64>> {
        self.samples.iter().map(|s| sample_std(s)).collect()
    }

    /// Mean dispersion of the top decile of the λ grid over that of the
    /// bottom decile. Diverged columns are left out of the means.
    pub fn decile_dispersion_ratio(&self) -> Result<f64> {
        let disp = self.dispersion();
        let n = disp.len();
        let k = (n / 10).max(1);
        let mean = |xs: &[Option<f64>]| {
            let v: Vec<f64> = xs.iter().flatten().copied().collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        };
        let bottom = mean(&disp[..k]).ok_or(Error::Fit("bottom decile has no finite columns"))?;
        let top = mean(&disp[n - k..]).ok_or(Error::Fit("top decile has no finite columns"))?;
        if bottom == 0.0 {
            return Err(Error::Fit("bottom decile has zero dispersion"));
        }
        Ok(top / bottom)
    }
}

fn sample_std(s: &[f64]) -> Option<f64> {
    if s.len() < 2 {
        return None;
    }
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let ss: f64 = s.iter().map(|x| (x - mean) * (x - mean)).sum();
    Some(sqrt(ss / (n - 1.0)))
}

/// Iterates `transient` steps, then records wrapped α after each of the
/// next `keep` steps. `None` if the orbit overflows.
pub fn bifurcation_column(p: &SetlerParams, s0: SphericalState, transient: usize, keep: usize) -> Option<Vec<f64>> {
    let mut s = s0;
    let mut out = Vec::with_capacity(keep);
    for n in 0..transient + keep {
        s = forced_step(s, p, n as u64).ok()?;
        if n >= transient {
            out.push(wrap_angle(s.alpha()));
        }
    }
    Some(out)
}

pub fn bifurcation_scan(p_base: &SetlerParams, settings: &BifurcationSettings, s0: SphericalState) -> Result<BifurcationData> {
    bifurcation_scan_with(&Sequential, p_base, settings, s0)
}

/// Columns are independent jobs; results are assembled in grid order.
pub fn bifurcation_scan_with<E: Executor>(
    exec: &E,
    p_base: &SetlerParams,
    settings: &BifurcationSettings,
    s0: SphericalState,
) -> Result<BifurcationData> {
    settings.validate()?;
    let grid = settings.grid();
    let columns = exec.map_indexed(grid.len(), |i| {
        bifurcation_column(&p_base.with_lambda(grid[i]), s0, settings.transient, settings.keep)
    });
    let diverged = columns.iter().map(Option::is_none).collect();
    let samples = columns.into_iter().map(Option::unwrap_or_default).collect();
    Ok(BifurcationData {
        param_values: grid,
        samples,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::sin;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = BifurcationSettings { n_lambda: 7, ..Default::default() }.grid();
        assert_eq!(g[0], 0.5);
        assert_eq!(g[6], 1.5);
        let g = BifurcationSettings::default().grid();
        assert_eq!((g[0], g[999]), (0.5, 1.5));
    }

    #[test]
    fn lambda_zero_follows_the_forcing() {
        let p = SetlerParams::CHAOS_STUDY.with_lambda(0.0);
        let s0 = SphericalState::new(0.1, 0.2, 4.24).unwrap();
        let col = bifurcation_column(&p, s0, 5, 20).unwrap();
        let mut alpha = 0.1;
        let mut want = Vec::new();
        for k in 0..25 {
            alpha += p.beta * sin(p.omega * k as f64);
            if k >= 5 {
                want.push(wrap_angle(alpha));
            }
        }
        for (g, w) in col.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_shape_and_validation() {
        let s = BifurcationSettings {
            n_lambda: 5,
            transient: 10,
            keep: 4,
            ..Default::default()
        };
        let s0 = SphericalState::new(0.1, 0.2, 4.24).unwrap();
        let data = bifurcation_scan(&SetlerParams::CHAOS_STUDY, &s, s0).unwrap();
        assert_eq!(data.samples.len(), 5);
        assert!(data.samples.iter().all(|c| c.len() == 4));
        assert!(data.samples.iter().flatten().all(|x| (0.0..core::f64::consts::TAU).contains(x)));

        for bad in [
            BifurcationSettings { n_lambda: 1, ..s },
            BifurcationSettings { keep: 0, ..s },
            BifurcationSettings { lambda_min: 2.0, ..s },
        ] {
            assert!(bifurcation_scan(&SetlerParams::CHAOS_STUDY, &bad, s0).is_err());
        }
    }

    #[test]
    fn overflowing_columns_are_flagged() {
        let s = BifurcationSettings {
            lambda_min: 1.0,
            lambda_max: 1e308,
            n_lambda: 2,
            transient: 50,
            keep: 5,
        };
        let s0 = SphericalState::new(0.1, 0.2, 4.24).unwrap();
        let data = bifurcation_scan(&SetlerParams::CHAOS_STUDY, &s, s0).unwrap();
        assert_eq!(data.diverged, [false, true]);
        assert!(data.samples[1].is_empty());
    }
}
