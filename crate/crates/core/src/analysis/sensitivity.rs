//! Paired runs that differ only in their parameters.

use alloc::vec::Vec;

use crate::continuous::integrate_setler;
use crate::exec::{Executor, Sequential};
use crate::state::{distance, SetlerParams, SphericalState, TimeGrid, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceSeries {
    pub times: Vec<f64>,
    /// Euclidean distance between the two states in `(α, δ, r)`.
    pub separation: Vec<f64>,
    pub alpha_a: Vec<f64>,
    pub alpha_b: Vec<f64>,
    /// Set when either run blew up; the series then stops at the last
    /// time both runs were finite.
    pub truncated: bool,
}

impl DivergenceSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(min, max)` of `α_a` and of `α_b` over samples with `t ≥ from`.
    pub fn alpha_ranges(&self, from: f64) -> ((f64, f64), (f64, f64)) {
        let range = |xs: &[f64]| {
            self.times
                .iter()
                .zip(xs)
                .filter(|(t, _)| **t >= from)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, &x)| (lo.min(x), hi.max(x)))
        };
        (range(&self.alpha_a), range(&self.alpha_b))
    }
}

pub fn sensitivity_pair(p_a: &SetlerParams, p_b: &SetlerParams, s0: SphericalState, grid: &TimeGrid) -> DivergenceSeries {
    sensitivity_pair_with(&Sequential, p_a, p_b, s0, grid)
}

/// The two runs are independent jobs on `exec`.
pub fn sensitivity_pair_with<E: Executor>(
    exec: &E,
    p_a: &SetlerParams,
    p_b: &SetlerParams,
    s0: SphericalState,
    grid: &TimeGrid,
) -> DivergenceSeries {
    let params = [*p_a, *p_b];
    let mut runs = exec.map_indexed(2, |i| match integrate_setler(s0, grid, &params[i]) {
        Ok(t) => (t, false),
        Err(d) => (d.partial, true),
    });
    let (b, b_div) = runs.pop().expect("two runs");
    let (a, a_div) = runs.pop().expect("two runs");
    pair_series(&a, &b, a_div || b_div)
}

fn pair_series(a: &Trajectory, b: &Trajectory, diverged: bool) -> DivergenceSeries {
    let n = a.len().min(b.len());
    // a diverged run's partial output ends with an off-grid node; keep
    // only the shared prefix of grid nodes
    let mut n_common = 0;
    while n_common < n && a.times()[n_common] == b.times()[n_common] {
        n_common += 1;
    }
    let mut out = DivergenceSeries {
        times: Vec::with_capacity(n_common),
        separation: Vec::with_capacity(n_common),
        alpha_a: Vec::with_capacity(n_common),
        alpha_b: Vec::with_capacity(n_common),
        truncated: diverged,
    };
    for k in 0..n_common {
        let (sa, sb) = (a.states()[k].to_array(), b.states()[k].to_array());
        out.times.push(a.times()[k]);
        out.separation.push(distance(&sa, &sb));
        out.alpha_a.push(sa[0]);
        out.alpha_b.push(sb[0]);
    }
    out
}
