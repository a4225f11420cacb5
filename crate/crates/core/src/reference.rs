//! The Lorenz system and attractor point clouds.

use alloc::string::String;
use alloc::vec::Vec;

use libm::{floor, sqrt};

use crate::analysis::lyapunov::{lyapunov_two_trajectory, TwoTrajectorySettings};
use crate::continuous::{integrate, SetlerField, VectorField};
use crate::error::{ensure_finite, Error, Result};
use crate::state::{spherical_to_cartesian, SetlerParams, SphericalState, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta_l: f64,
}

impl LorenzParams {
    pub const CLASSIC: LorenzParams = LorenzParams {
        sigma: 10.0,
        rho: 28.0,
        beta_l: 8.0 / 3.0,
    };

    pub fn new(sigma: f64, rho: f64, beta_l: f64) -> Result<Self> {
        let p = Self { sigma, rho, beta_l };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("sigma", self.sigma)?;
        ensure_finite("rho", self.rho)?;
        ensure_finite("beta_l", self.beta_l)?;
        Ok(())
    }

    /// The origin, plus `C±` when `β_l(ρ − 1) > 0`.
    pub fn fixed_points(&self) -> Vec<[f64; 3]> {
        let mut pts = alloc::vec![[0.0; 3]];
        let q = self.beta_l * (self.rho - 1.0);
        if q > 0.0 {
            let s = sqrt(q);
            pts.push([s, s, self.rho - 1.0]);
            pts.push([-s, -s, self.rho - 1.0]);
        }
        pts
    }

    /// Trace of the Jacobian, the same everywhere.
    pub fn divergence(&self) -> f64 {
        -(self.sigma + 1.0 + self.beta_l)
    }
}

/// `(σ(y − x), x(ρ − z) − y, xy − β_l z)`.
pub fn lorenz_field(s: [f64; 3], p: &LorenzParams) -> [f64; 3] {
    let [x, y, z] = s;
    [p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta_l * z]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzField {
    pub params: LorenzParams,
}

impl VectorField for LorenzField {
    fn eval(&self, _tau: f64, y: [f64; 3]) -> [f64; 3] {
        lorenz_field(y, &self.params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttractorSystem {
    Lorenz(LorenzParams),
    /// Integrated in `(α, δ, r)`, sampled in Cartesian coordinates.
    Setler(SetlerParams),
}

impl AttractorSystem {
    pub fn name(&self) -> &'static str {
        match self {
            AttractorSystem::Lorenz(_) => "lorenz",
            AttractorSystem::Setler(_) => "setler",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudMeta {
    pub system: AttractorSystem,
    /// Initial state in the system's native coordinates.
    pub initial: [f64; 3],
    pub grid: TimeGrid,
    pub transient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<[f64; 3]>,
    pub meta: CloudMeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl PointCloud {
    pub fn bounding_box(&self) -> BoundingBox {
        let mut b = BoundingBox {
            min: [f64::INFINITY; 3],
            max: [f64::NEG_INFINITY; 3],
        };
        for p in &self.points {
            for i in 0..3 {
                b.min[i] = b.min[i].min(p[i]);
                b.max[i] = b.max[i].max(p[i]);
            }
        }
        b
    }
}

/// Index of the first grid node strictly after `transient`.
fn first_kept(grid: &TimeGrid, transient: f64) -> usize {
    let x = (transient - grid.t0()) / grid.h();
    if x < 0.0 {
        return 0;
    }
    floor(x + 1e-9 * x.max(1.0)) as usize + 1
}

/// Integrates with RK4 and keeps the nodes with `τ > transient`.
pub fn attractor_sample(system: AttractorSystem, s0: [f64; 3], grid: &TimeGrid, transient: f64) -> Result<PointCloud> {
    ensure_finite("transient", transient)?;
    let span_end = grid.time(grid.steps());
    if !(transient < span_end) {
        return Err(Error::invalid("transient", "must be shorter than the grid span"));
    }
    let first = first_kept(grid, transient);
    let points: Vec<[f64; 3]> = match system {
        AttractorSystem::Lorenz(p) => {
            p.validate()?;
            let traj = integrate(&LorenzField { params: p }, s0, grid)?;
            traj.states()[first.min(traj.len())..].to_vec()
        }
        AttractorSystem::Setler(p) => {
            p.validate()?;
            let start = SphericalState::new(s0[0], s0[1], s0[2])?;
            let traj = integrate(&SetlerField::new(p), start, grid)?;
            traj.states()[first.min(traj.len())..]
                .iter()
                .map(|s| spherical_to_cartesian(*s).to_array())
                .collect()
        }
    };
    Ok(PointCloud {
        points,
        meta: CloudMeta {
            system,
            initial: s0,
            grid: *grid,
            transient,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub bbox_a: BoundingBox,
    pub bbox_b: BoundingBox,
    pub largest_lyapunov_a: f64,
    pub largest_lyapunov_b: f64,
    pub lobe_note: String,
}

/// Two-trajectory exponent of the run that produced `cloud`, skipping its
/// transient.
pub fn cloud_lyapunov(cloud: &PointCloud, settings: &TwoTrajectorySettings) -> Result<f64> {
    let m = &cloud.meta;
    let s = TwoTrajectorySettings {
        transient_steps: first_kept(&m.grid, m.transient).saturating_sub(1),
        ..*settings
    };
    let est = match m.system {
        AttractorSystem::Lorenz(p) => lyapunov_two_trajectory(&LorenzField { params: p }, m.initial, &m.grid, &s)?,
        AttractorSystem::Setler(p) => {
            let start = SphericalState::new(m.initial[0], m.initial[1], m.initial[2])?;
            lyapunov_two_trajectory(&SetlerField::new(p), start, &m.grid, &s)?
        }
    };
    Ok(est.exponent)
}

pub fn compare_attractors(a: &PointCloud, b: &PointCloud, settings: &TwoTrajectorySettings) -> Result<ComparisonReport> {
    if a.points.is_empty() || b.points.is_empty() {
        return Err(Error::invalid("point cloud", "must be non-empty"));
    }
    Ok(ComparisonReport {
        bbox_a: a.bounding_box(),
        bbox_b: b.bounding_box(),
        largest_lyapunov_a: cloud_lyapunov(a, settings)?,
        largest_lyapunov_b: cloud_lyapunov(b, settings)?,
        lobe_note: String::from("extents and exponents only; lobe structure is left to inspection of the point clouds"),
    })
}
