//! Subcommand implementations.
//!
//! Each command first reads and validates every setting it uses (errors
//! there exit with 2), then runs the computation (a blow-up exits with 1).

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use setler_core::analysis::bifurcation::BifurcationSettings;
use setler_core::analysis::jacobian::jacobian_autonomous;
use setler_core::analysis::lyapunov::{logistic, lyapunov_1d, lyapunov_map_two_trajectory, lyapunov_two_trajectory, TwoTrajectorySettings};
use setler_core::analysis::{bifurcation_scan_with, sensitivity_pair_with, AsymptoticFit};
use setler_core::continuous::{integrate_decimated, SetlerField};
use setler_core::discrete::iterate_map;
use setler_core::entropy::{
    closed_form_alpha, closed_form_delta, closed_form_r, closed_form_residual, entropy_growth_rate, f_functional_gaussian_with,
    f_functional_perturbed_with, f_functional_quadratic_with, pre_suppression_window, w_series, ClosedFormParams, EntropySpec,
    FunctionalResult, GaussianProfile, ResidualTarget,
};
use setler_core::montecarlo::{McSettings, DEFAULT_SEED};
use setler_core::quadrature::QuadratureSettings;
use setler_core::reference::{attractor_sample, compare_attractors, AttractorSystem, BoundingBox, LorenzField, LorenzParams, PointCloud};
use setler_core::{spherical_to_cartesian, SetlerParams, SphericalState, TimeGrid, Trajectory};
use thiserror::Error;

use crate::config::{ConfigError, Settings};
use crate::output::{fmt_f64, num, write_json, write_sidecar, CsvSink};
use crate::parallel::Parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Map,
    Lyapunov,
    Bifurcate,
    Attractor,
    Compare,
    Sensitivity,
    Jacobian,
    EntropyF,
    EntropyW,
    ClosedForm,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Simulate,
        Command::Map,
        Command::Lyapunov,
        Command::Bifurcate,
        Command::Attractor,
        Command::Compare,
        Command::Sensitivity,
        Command::Jacobian,
        Command::EntropyF,
        Command::EntropyW,
        Command::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Map => "map",
            Command::Lyapunov => "lyapunov",
            Command::Bifurcate => "bifurcate",
            Command::Attractor => "attractor",
            Command::Compare => "compare",
            Command::Sensitivity => "sensitivity",
            Command::Jacobian => "jacobian",
            Command::EntropyF => "entropy-f",
            Command::EntropyW => "entropy-w",
            Command::ClosedForm => "closed-form",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::Simulate => "RK4 trajectory of the forced flow (CSV t,alpha,delta,r,x,y,z)",
            Command::Map => "iterate the forced discrete map (CSV, integer t)",
            Command::Lyapunov => "largest Lyapunov exponent (JSON)",
            Command::Bifurcate => "λ sweep of the discrete map (CSV lambda,sample_index,alpha_wrapped)",
            Command::Attractor => "post-transient point cloud (CSV x,y,z)",
            Command::Compare => "compare two attractors: extents and exponents (JSON)",
            Command::Sensitivity => "two runs differing in λ (CSV t,alpha_a,alpha_b,separation)",
            Command::Jacobian => "Jacobian and eigenvalues of the unforced field (JSON)",
            Command::EntropyF => "F-functional: reference value, quadrature and Monte Carlo (JSON)",
            Command::EntropyW => "W-functional series of an exponential fit (CSV tau,W,f,dfdtau)",
            Command::ClosedForm => "separable closed-form α, δ, r and their residuals (CSV tau,alpha,delta,r)",
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Command::Lyapunov | Command::Compare | Command::Jacobian | Command::EntropyF => "json",
            _ => "csv",
        }
    }

    pub fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) | RunError::Io(_) => 1,
        }
    }
}

fn numerical(e: setler_core::Error) -> RunError {
    RunError::Numerical(e.to_string())
}

/// What a successful run produced.
#[derive(Debug)]
pub struct Outcome {
    pub artifact: PathBuf,
    pub sidecar: PathBuf,
    pub summary: String,
}

pub fn run(cmd: Command, settings: &Settings) -> Result<Outcome, RunError> {
    let default_out = format!("{}.{}", cmd.name(), cmd.extension());
    let artifact = PathBuf::from(settings.text("output", &default_out));
    let threads = settings.usize("threads", 0)?;
    let exec = Parallel::new(threads).map_err(|e| ConfigError::invalid("threads", e.to_string()))?;
    let ctx = Ctx {
        settings,
        exec: &exec,
        artifact: &artifact,
    };
    let result = match cmd {
        Command::Simulate => simulate(&ctx),
        Command::Map => map(&ctx),
        Command::Lyapunov => lyapunov(&ctx),
        Command::Bifurcate => bifurcate(&ctx),
        Command::Attractor => attractor(&ctx),
        Command::Compare => compare(&ctx),
        Command::Sensitivity => sensitivity(&ctx),
        Command::Jacobian => jacobian(&ctx),
        Command::EntropyF => entropy_f(&ctx),
        Command::EntropyW => entropy_w(&ctx),
        Command::ClosedForm => closed_form(&ctx),
    };
    // the sidecar is written for partial artifacts too
    let sidecar = match &result {
        Ok(_) | Err(RunError::Numerical(_)) => Some(write_sidecar(&artifact, cmd.name(), &settings.effective())?),
        Err(_) => None,
    };
    let summary = result?;
    Ok(Outcome {
        artifact,
        sidecar: sidecar.expect("written on success"),
        summary,
    })
}

struct Ctx<'a> {
    settings: &'a Settings,
    exec: &'a Parallel,
    artifact: &'a Path,
}

fn setler_params(s: &Settings, d: SetlerParams) -> Result<SetlerParams, ConfigError> {
    Ok(SetlerParams::new(
        s.f64("lambda", d.lambda)?,
        s.f64("beta", d.beta)?,
        s.f64("gamma", d.gamma)?,
        s.f64("delta_f", d.delta_f)?,
        s.f64("omega", d.omega)?,
    )?)
}

fn setler_state(s: &Settings, d: [f64; 3]) -> Result<SphericalState, ConfigError> {
    Ok(SphericalState::new(s.f64("alpha0", d[0])?, s.f64("delta0", d[1])?, s.f64("r0", d[2])?)?)
}

fn lorenz_params(s: &Settings, rho_key: &'static str) -> Result<LorenzParams, ConfigError> {
    let c = LorenzParams::CLASSIC;
    let rho = if rho_key == "rho" {
        s.f64("rho", c.rho)?
    } else {
        let a = s.f64("rho", c.rho)?;
        s.f64(rho_key, a)?
    };
    Ok(LorenzParams::new(s.f64("sigma", c.sigma)?, rho, s.f64("beta_l", c.beta_l)?)?)
}

fn lorenz_state(s: &Settings) -> Result<[f64; 3], ConfigError> {
    Ok([s.f64("x0", 1.0)?, s.f64("y0", 1.0)?, s.f64("z0", 1.0)?])
}

fn grid(s: &Settings, t0: f64, t1: f64, h: f64) -> Result<TimeGrid, ConfigError> {
    Ok(TimeGrid::new(s.f64("t0", t0)?, s.f64("t1", t1)?, s.f64("h", h)?)?)
}

fn two_trajectory(s: &Settings, transient_steps: usize) -> Result<TwoTrajectorySettings, ConfigError> {
    let t = TwoTrajectorySettings {
        d0: s.f64("d0", 1e-8)?,
        renorm_every: s.usize("renorm_every", 10)?,
        transient_steps,
    };
    t.validate()?;
    Ok(t)
}

fn transient_steps(s: &Settings, grid: &TimeGrid, default: f64) -> Result<usize, ConfigError> {
    let t = s.f64("transient_time", default)?;
    if t < 0.0 {
        return Err(ConfigError::invalid("transient_time", "must be non-negative"));
    }
    let steps = (t / grid.h()).round() as usize;
    if steps >= grid.steps() {
        return Err(ConfigError::invalid("transient_time", "must be shorter than the time span"));
    }
    Ok(steps)
}

fn params_json(p: &SetlerParams) -> Value {
    json!({"lambda": p.lambda, "beta": p.beta, "gamma": p.gamma, "delta_f": p.delta_f, "omega": p.omega})
}

fn lorenz_json(p: &LorenzParams) -> Value {
    json!({"sigma": p.sigma, "rho": p.rho, "beta_l": p.beta_l})
}

fn trajectory_row(t: String, s: SphericalState) -> Vec<String> {
    let c = spherical_to_cartesian(s);
    let mut row = vec![t];
    row.extend([s.alpha(), s.delta(), s.r(), c.x, c.y, c.z].iter().map(|v| fmt_f64(*v)));
    row
}

const TRAJECTORY_HEADER: [&str; 7] = ["t", "alpha", "delta", "r", "x", "y", "z"];

fn simulate(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let p = setler_params(s, SetlerParams::CASE_ONE)?;
    let s0 = setler_state(s, [0.1, 0.2, 0.3])?;
    let g = grid(s, 0.0, 10.0, 0.01)?;
    let every = s.usize("checkpoint_every", 1)?;
    if every == 0 {
        return Err(ConfigError::invalid("checkpoint_every", "must be at least 1").into());
    }

    let (traj, failure): (Trajectory, _) = match integrate_decimated(&SetlerField::new(p), s0, &g, every) {
        Ok(t) => (t, None),
        Err(d) => (d.partial, Some(d.last_finite)),
    };
    let mut sink = CsvSink::create(ctx.artifact, &TRAJECTORY_HEADER)?;
    for (t, st) in traj.iter() {
        sink.row(&trajectory_row(fmt_f64(t), st))?;
    }
    let rows = sink.finish()?;
    if let Some(t) = failure {
        let step = ((t - g.t0()) / g.h()).round() as u64 + 1;
        return Err(RunError::Numerical(format!(
            "simulate: state became non-finite in RK4 step {step} (from τ = {t}); {rows} rows kept in {}",
            ctx.artifact.display()
        )));
    }
    Ok(format!("simulate: {rows} rows, τ ∈ [{}, {}] -> {}", g.t0(), traj.last().0, ctx.artifact.display()))
}

fn map(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let p = setler_params(s, SetlerParams::CHAOS_STUDY)?;
    let s0 = setler_state(s, [0.1, 0.2, 4.24])?;
    let steps = s.usize("steps", 1000)?;

    let (traj, failure) = match iterate_map(s0, &p, steps) {
        Ok(t) => (t, None),
        Err(d) => (d.partial, Some(d.last_finite as u64)),
    };
    let mut sink = CsvSink::create(ctx.artifact, &TRAJECTORY_HEADER)?;
    for (t, st) in traj.iter() {
        sink.row(&trajectory_row(format!("{}", t as u64), st))?;
    }
    let rows = sink.finish()?;
    if let Some(k) = failure {
        return Err(RunError::Numerical(format!(
            "map: state became non-finite at step {} (last finite step {k}); {rows} rows kept in {}",
            k + 1,
            ctx.artifact.display()
        )));
    }
    Ok(format!("map: {steps} steps, {rows} rows -> {}", ctx.artifact.display()))
}

fn lyapunov(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let method = s.choice("method", "two-trajectory", &["two-trajectory", "algorithm1", "map"])?;
    let (doc, exponent) = match method {
        "algorithm1" => {
            let a = s.f64("logistic_a", 4.0)?;
            let x0 = s.f64("logistic_x0", 0.2)?;
            let n = s.usize("iterations", 100_000)?;
            let tr = s.usize("transient", 1000)?;
            if n <= tr {
                return Err(ConfigError::invalid("iterations", "must exceed transient").into());
            }
            let est = lyapunov_1d(&logistic(), x0, a, n, tr).map_err(numerical)?;
            let doc = json!({
                "method": method,
                "system": "logistic",
                "params": {"a": a, "x0": x0},
                "exponent": num(est.exponent),
                "n": n,
                "transient": tr,
                "terms": est.terms,
                "warnings": est.warnings,
            });
            (doc, est.exponent)
        }
        "map" => {
            let p = setler_params(s, SetlerParams::CHAOS_STUDY)?;
            let s0 = setler_state(s, [0.1, 0.2, 4.24])?;
            let n = s.usize("steps", 10_000)?;
            let tr = s.usize("transient", 0)?;
            let settings = two_trajectory(s, tr)?;
            let est = lyapunov_map_two_trajectory(&p, s0, n, &settings).map_err(numerical)?;
            let doc = json!({
                "method": method,
                "system": "setler-map",
                "params": params_json(&p),
                "initial": s0.to_array(),
                "exponent": num(est.exponent),
                "n": n,
                "transient": tr,
                "d0": settings.d0,
                "renorm_every": settings.renorm_every,
                "windows": est.terms,
                "warnings": est.warnings,
            });
            (doc, est.exponent)
        }
        _ => {
            let system = s.choice("system", "setler", &["setler", "lorenz"])?;
            let (g, params, initial, settings, est) = match system {
                "lorenz" => {
                    let p = lorenz_params(s, "rho")?;
                    let y0 = lorenz_state(s)?;
                    let g = grid(s, 0.0, 500.0, 0.01)?;
                    let settings = two_trajectory(s, transient_steps(s, &g, 10.0)?)?;
                    let est = lyapunov_two_trajectory(&LorenzField { params: p }, y0, &g, &settings);
                    (g, lorenz_json(&p), y0, settings, est)
                }
                _ => {
                    let p = setler_params(s, SetlerParams::CHAOS_STUDY)?;
                    let s0 = setler_state(s, [0.1, 0.2, 4.24])?;
                    let g = grid(s, 0.0, 1000.0, 0.01)?;
                    let settings = two_trajectory(s, transient_steps(s, &g, 10.0)?)?;
                    let est = lyapunov_two_trajectory(&SetlerField::new(p), s0, &g, &settings);
                    (g, params_json(&p), s0.to_array(), settings, est)
                }
            };
            let est = est.map_err(numerical)?;
            let tr = settings.transient_steps;
            let doc = json!({
                "method": method,
                "system": system,
                "params": params,
                "initial": initial,
                "exponent": num(est.exponent),
                "n": g.steps(),
                "transient": tr,
                "h": g.h(),
                "d0": settings.d0,
                "renorm_every": settings.renorm_every,
                "windows": est.terms,
                "warnings": est.warnings,
            });
            (doc, est.exponent)
        }
    };
    write_json(ctx.artifact, &doc)?;
    Ok(format!("lyapunov ({method}): exponent {exponent:.6} -> {}", ctx.artifact.display()))
}

fn bifurcate(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let p = setler_params(s, SetlerParams::CHAOS_STUDY)?;
    let s0 = setler_state(s, [0.1, 0.2, 4.24])?;
    let d = BifurcationSettings::default();
    let settings = BifurcationSettings {
        lambda_min: s.f64("lambda_min", d.lambda_min)?,
        lambda_max: s.f64("lambda_max", d.lambda_max)?,
        n_lambda: s.usize("n_lambda", d.n_lambda)?,
        transient: s.usize("transient", d.transient)?,
        keep: s.usize("keep", d.keep)?,
    };
    settings.validate().map_err(ConfigError::from)?;

    let data = bifurcation_scan_with(ctx.exec, &p, &settings, s0).map_err(numerical)?;
    let mut sink = CsvSink::create(ctx.artifact, &["lambda", "sample_index", "alpha_wrapped"])?;
    for (lambda, column) in data.param_values.iter().zip(&data.samples) {
        let l = fmt_f64(*lambda);
        for (i, a) in column.iter().enumerate() {
            sink.row(&[l.clone(), i.to_string(), fmt_f64(*a)])?;
        }
    }
    let rows = sink.finish()?;
    let diverged = data.diverged.iter().filter(|d| **d).count();
    if diverged > 0 {
        eprintln!("bifurcate: {diverged} of {} columns diverged and were left empty", data.diverged.len());
    }
    let ratio = match data.decile_dispersion_ratio() {
        Ok(r) => format!("{r:.4}"),
        Err(e) => format!("n/a ({e})"),
    };
    Ok(format!(
        "bifurcate: {} λ values, {rows} rows, decile dispersion ratio {ratio} -> {}",
        settings.n_lambda,
        ctx.artifact.display()
    ))
}

fn attractor_system(s: &Settings, key: &'static str, default: &'static str, rho_key: &'static str) -> Result<(AttractorSystem, [f64; 3]), ConfigError> {
    Ok(match s.choice(key, default, &["setler", "lorenz"])? {
        "lorenz" => (AttractorSystem::Lorenz(lorenz_params(s, rho_key)?), lorenz_state(s)?),
        _ => (
            AttractorSystem::Setler(setler_params(s, SetlerParams::ATTRACTOR)?),
            setler_state(s, [0.1, 0.2, 0.3])?.to_array(),
        ),
    })
}

fn attractor(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let (system, s0) = attractor_system(s, "system", "setler", "rho")?;
    let g = grid(s, 0.0, 100.0, 0.01)?;
    let transient = s.f64("transient_time", 10.0)?;
    if !(transient >= 0.0 && transient < g.t1() - g.t0()) {
        return Err(ConfigError::invalid("transient_time", "must be in [0, t1 - t0)").into());
    }
    let cloud = attractor_sample(system, s0, &g, g.t0() + transient).map_err(numerical)?;
    let mut sink = CsvSink::create(ctx.artifact, &["x", "y", "z"])?;
    for p in &cloud.points {
        sink.floats(p)?;
    }
    let rows = sink.finish()?;
    Ok(format!("attractor ({}): {rows} points -> {}", system.name(), ctx.artifact.display()))
}

fn bbox_json(b: &BoundingBox) -> Value {
    json!({"min": b.min, "max": b.max})
}

fn cloud_json(c: &PointCloud) -> Value {
    let params = match c.meta.system {
        AttractorSystem::Lorenz(p) => lorenz_json(&p),
        AttractorSystem::Setler(p) => params_json(&p),
    };
    json!({
        "system": c.meta.system.name(),
        "params": params,
        "initial": c.meta.initial,
        "points": c.points.len(),
    })
}

fn compare(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let (sys_a, s0_a) = attractor_system(s, "system", "setler", "rho")?;
    let (sys_b, s0_b) = attractor_system(s, "compare_with", "lorenz", "rho_b")?;
    let g = grid(s, 0.0, 100.0, 0.01)?;
    let transient = s.f64("transient_time", 10.0)?;
    if !(transient >= 0.0 && transient < g.t1() - g.t0()) {
        return Err(ConfigError::invalid("transient_time", "must be in [0, t1 - t0)").into());
    }
    let settings = two_trajectory(s, 0)?;

    let clouds = [(sys_a, s0_a), (sys_b, s0_b)];
    let mut out = Vec::with_capacity(2);
    for (sys, s0) in clouds {
        out.push(attractor_sample(sys, s0, &g, g.t0() + transient).map_err(numerical)?);
    }
    let report = compare_attractors(&out[0], &out[1], &settings).map_err(numerical)?;
    let doc = json!({
        "a": cloud_json(&out[0]),
        "b": cloud_json(&out[1]),
        "bbox_a": bbox_json(&report.bbox_a),
        "bbox_b": bbox_json(&report.bbox_b),
        "largest_lyapunov_a": num(report.largest_lyapunov_a),
        "largest_lyapunov_b": num(report.largest_lyapunov_b),
        "lobe_note": report.lobe_note,
    });
    write_json(ctx.artifact, &doc)?;
    Ok(format!(
        "compare: {} λ₁ = {:.4}, {} λ₁ = {:.4} -> {}",
        sys_a.name(),
        report.largest_lyapunov_a,
        sys_b.name(),
        report.largest_lyapunov_b,
        ctx.artifact.display()
    ))
}

fn sensitivity(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let base = SetlerParams {
        lambda: 10.0,
        beta: 0.5,
        gamma: 0.5,
        delta_f: 0.5,
        omega: 0.5,
    };
    let p_a = setler_params(s, base)?;
    let p_b = p_a.with_lambda(s.f64("lambda_b", 17.2)?);
    let s0 = setler_state(s, [0.1, 0.2, 0.3])?;
    let g = grid(s, 0.0, 50.0, 1e-3)?;

    let series = sensitivity_pair_with(ctx.exec, &p_a, &p_b, s0, &g);
    let mut sink = CsvSink::create(ctx.artifact, &["t", "alpha_a", "alpha_b", "separation"])?;
    for i in 0..series.len() {
        sink.floats(&[series.times[i], series.alpha_a[i], series.alpha_b[i], series.separation[i]])?;
    }
    let rows = sink.finish()?;
    if series.truncated {
        let last = series.times.last().copied().unwrap_or(g.t0());
        return Err(RunError::Numerical(format!(
            "sensitivity: a run became non-finite after τ = {last}; {rows} rows kept in {}",
            ctx.artifact.display()
        )));
    }
    let final_sep = series.separation.last().copied().unwrap_or(0.0);
    Ok(format!(
        "sensitivity: λ {} vs {}, {rows} rows, final separation {final_sep:.4e} -> {}",
        p_a.lambda,
        p_b.lambda,
        ctx.artifact.display()
    ))
}

fn jacobian(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let lambda = s.f64("lambda", 1.0)?;
    let st = setler_state(s, [0.0, 0.0, 0.0])?;
    let rep = jacobian_autonomous(st, lambda);
    let eig: Vec<Value> = rep.eigenvalues.iter().map(|z| json!({"re": num(z.re), "im": num(z.im)})).collect();
    let doc = json!({
        "state": st.to_array(),
        "lambda": lambda,
        "matrix": rep.matrix,
        "eigenvalues": eig,
    });
    write_json(ctx.artifact, &doc)?;
    let text: Vec<String> = rep.eigenvalues.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
    Ok(format!("jacobian: eigenvalues {} -> {}", text.join(", "), ctx.artifact.display()))
}

fn entropy_spec(s: &Settings, curvature_default: f64) -> Result<EntropySpec, ConfigError> {
    let d = EntropySpec::default();
    let spec = EntropySpec {
        curvature: s.f64("curvature", curvature_default)?,
        r_max: s.f64("r_max", d.r_max)?,
        quadrature: QuadratureSettings {
            rel_tol: s.f64("quad_rel_tol", d.quadrature.rel_tol)?,
            ..d.quadrature
        },
        mc: McSettings {
            samples: s.u64("mc_samples", d.mc.samples)?,
            batches: u32::try_from(s.u64("mc_batches", u64::from(d.mc.batches))?)
                .map_err(|_| ConfigError::invalid("mc_batches", "too large"))?,
            seed: s.u64("seed", DEFAULT_SEED)?,
        },
        drop_exp_f: s.bool("drop_exp_f", d.drop_exp_f)?,
    };
    spec.validate().map_err(ConfigError::from)?;
    Ok(spec)
}

fn spec_json(spec: &EntropySpec) -> Value {
    json!({
        "curvature": spec.curvature,
        "r_max": spec.r_max,
        "quad_rel_tol": spec.quadrature.rel_tol,
        "mc_samples": spec.mc.samples,
        "mc_batches": spec.mc.batches,
        "seed": format!("{:#x}", spec.mc.seed),
        "drop_exp_f": spec.drop_exp_f,
    })
}

fn entropy_f(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let case = s.choice("case", "gaussian", &["gaussian", "quadratic", "perturbed"])?;
    let spec = entropy_spec(s, if case == "perturbed" { 1.0 } else { 0.0 })?;
    let profile = if case == "quadratic" {
        None
    } else {
        Some(GaussianProfile::new(s.f64("spread", 1.0)?).map_err(ConfigError::from)?)
    };

    let res: FunctionalResult = match (case, profile) {
        ("quadratic", _) => f_functional_quadratic_with(ctx.exec, &spec),
        ("perturbed", Some(g)) => f_functional_perturbed_with(ctx.exec, &g, &spec),
        (_, Some(g)) => f_functional_gaussian_with(ctx.exec, &g, &spec),
        _ => unreachable!("profile exists for gaussian cases"),
    }
    .map_err(numerical)?;
    for w in &res.warnings {
        eprintln!("entropy-f: warning: {w}");
    }
    let mut settings = spec_json(&spec);
    if let Some(g) = profile {
        settings["spread"] = json!(g.sigma);
    }
    let doc = json!({
        "case": case,
        "paper_value": num(res.paper_value),
        "quadrature_value": num(res.quadrature_value),
        "quadrature_error": num(res.quadrature_error),
        "mc_value": num(res.mc_value),
        "mc_stderr": num(res.mc_stderr),
        "mc_samples": res.mc_samples,
        "mc_z_score": num(res.mc_z_score()),
        "discrepancy_flag": res.discrepancy_flag,
        "correction": res.correction.map(num),
        "warnings": res.warnings,
        "settings": settings,
    });
    write_json(ctx.artifact, &doc)?;
    Ok(format!(
        "entropy-f ({case}): closed form {:.6e}, quadrature {:.6e}, mc {:.6e} ± {:.1e}{} -> {}",
        res.paper_value,
        res.quadrature_value,
        res.mc_value,
        res.mc_stderr,
        if res.discrepancy_flag { ", discrepancy" } else { "" },
        ctx.artifact.display()
    ))
}

fn entropy_w(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let fit = AsymptoticFit::new(s.f64("c1", 1e-4)?, s.f64("kappa1", 0.1)?, s.f64("c2", 0.0)?, s.f64("kappa2", 0.0)?).map_err(ConfigError::from)?;
    let spec = EntropySpec {
        curvature: s.f64("curvature", 0.0)?,
        r_max: s.f64("r_max", 10.0)?,
        quadrature: QuadratureSettings {
            rel_tol: s.f64("quad_rel_tol", 1e-12)?,
            ..QuadratureSettings::default()
        },
        ..EntropySpec::default()
    };
    spec.validate().map_err(ConfigError::from)?;
    let g = grid(s, 0.0, 40.0, 0.1)?;
    let taus: Vec<f64> = (0..=g.steps()).map(|k| g.time(k)).collect();

    let series = w_series(&fit, &taus, &spec).map_err(numerical)?;
    let mut sink = CsvSink::create(ctx.artifact, &["tau", "W", "f", "dfdtau"])?;
    for e in &series {
        sink.floats(&[e.tau, e.w, e.f, e.dfdtau])?;
    }
    let rows = sink.finish()?;
    let suppressed = series.iter().filter(|e| e.suppressed).count();
    let rate = match entropy_growth_rate(&pre_suppression_window(&series)) {
        Ok(r) => format!("{r:.6}"),
        Err(e) => format!("n/a ({e})"),
    };
    Ok(format!(
        "entropy-w: {rows} rows, {suppressed} suppressed, growth rate {rate} -> {}",
        ctx.artifact.display()
    ))
}

fn closed_form(ctx: &Ctx) -> Result<String, RunError> {
    let s = ctx.settings;
    let d = SetlerParams::CASE_ONE;
    let p = ClosedFormParams {
        lambda: s.f64("lambda", d.lambda)?,
        beta: s.f64("beta", d.beta)?,
        gamma: s.f64("gamma", d.gamma)?,
        omega: s.f64("omega", d.omega)?,
        delta_f: s.f64("delta_f", d.delta_f)?,
        alpha0: s.f64("alpha0", 0.1)?,
        delta0: s.f64("delta0", 0.2)?,
        c1: s.f64("cf_c1", 0.0)?,
        c2: s.f64("cf_c2", 0.0)?,
        c3: s.f64("cf_c3", 0.0)?,
    };
    p.validate().map_err(ConfigError::from)?;
    let g = grid(s, 0.0, 10.0, 0.01)?;
    let quad = QuadratureSettings {
        rel_tol: s.f64("quad_rel_tol", 1e-12)?,
        ..QuadratureSettings::default()
    };

    let mut sink = CsvSink::create(ctx.artifact, &["tau", "alpha", "delta", "r"])?;
    let mut saturated = 0usize;
    for k in 0..=g.steps() {
        let tau = g.time(k);
        let a = closed_form_alpha(tau, &p).map_err(numerical)?;
        let dl = closed_form_delta(tau, &p).map_err(numerical)?;
        let r = closed_form_r(tau, &p, &quad).map_err(numerical)?;
        saturated += usize::from(a.saturated || dl.saturated);
        sink.floats(&[tau, a.value, dl.value, r])?;
    }
    let rows = sink.finish()?;
    if saturated > 0 {
        eprintln!("closed-form: exp overflowed at {saturated} nodes; angles saturated to π");
    }
    let sep = closed_form_residual(&p, &g, ResidualTarget::Separable).map_err(numerical)?;
    let full = closed_form_residual(&p, &g, ResidualTarget::FullForced).map_err(numerical)?;
    Ok(format!(
        "closed-form: {rows} rows, residual vs separable ODE {:.3e}, vs forced ODE {:.3e} -> {}",
        sep.max_residual,
        full.max_residual,
        ctx.artifact.display()
    ))
}
