use proptest::prelude::*;

use setler_core::analysis::fit::fit_asymptotic;
use setler_core::analysis::jacobian::jacobian_matrix;
use setler_core::analysis::lyapunov::{lyapunov_1d, ScalarMap};
use setler_core::analysis::sensitivity_pair;
use setler_core::continuous::euler_discretize;
use setler_core::discrete::forced_step;
use setler_core::entropy::{closed_form_residual, w_functional, ClosedFormParams, EntropySpec, ResidualTarget};
use setler_core::analysis::AsymptoticFit;
use setler_core::reference::{attractor_sample, lorenz_field, AttractorSystem, LorenzParams};
use setler_core::{spherical_to_cartesian, wrap_state, SetlerParams, SphericalState, TimeGrid};

fn unforced(y: [f64; 3], lambda: f64) -> [f64; 3] {
    let (sa, ca, sd, cd) = (y[0].sin(), y[0].cos(), y[1].sin(), y[1].cos());
    [lambda * sa * cd, lambda * ca * sd, lambda * (sd * ca).powi(2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn wrapped_alpha_in_range(a in -1e6f64..1e6, d in -10.0f64..10.0, r in -10.0f64..10.0) {
        let w = wrap_state(SphericalState::new(a, d, r).unwrap());
        prop_assert!((0.0..std::f64::consts::TAU).contains(&w.alpha()));
        prop_assert_eq!(w.delta(), d);
        prop_assert_eq!(w.r(), r);
    }

    #[test]
    fn cartesian_norm_is_radius(a in -10.0f64..10.0, d in -10.0f64..10.0, r in -100.0f64..100.0) {
        let c = spherical_to_cartesian(SphericalState::new(a, d, r).unwrap());
        prop_assert!((c.norm() - r.abs()).abs() <= 1e-12 * r.abs().max(1.0));
    }

    #[test]
    fn unit_euler_step_equals_map(a in -4.0f64..4.0, d in -4.0f64..4.0, r in -5.0f64..5.0,
                                  lambda in 0.0f64..3.0, n in 0u64..10_000) {
        let p = SetlerParams::CHAOS_STUDY.with_lambda(lambda);
        let s = SphericalState::new(a, d, r).unwrap();
        let e = euler_discretize(s, n as f64, 1.0, &p).unwrap();
        let m = forced_step(s, &p, n).unwrap();
        prop_assert_eq!(e.to_array().map(f64::to_bits), m.to_array().map(f64::to_bits));
    }

    #[test]
    fn jacobian_matches_finite_differences(a in -4.0f64..4.0, d in -4.0f64..4.0, r in -5.0f64..5.0,
                                           lambda in 0.0f64..5.0) {
        let s = SphericalState::new(a, d, r).unwrap();
        let m = jacobian_matrix(s, lambda);
        let h = 1e-6;
        for j in 0..3 {
            let (mut yp, mut ym) = (s.to_array(), s.to_array());
            yp[j] += h;
            ym[j] -= h;
            let (fp, fm) = (unforced(yp, lambda), unforced(ym, lambda));
            for i in 0..3 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                prop_assert!((fd - m[i][j]).abs() < 1e-6, "({},{}) {} vs {}", i, j, fd, m[i][j]);
            }
        }
    }

    #[test]
    fn lorenz_divergence_is_constant(x in -30.0f64..30.0, y in -30.0f64..30.0, z in -10.0f64..60.0,
                                     sigma in 1.0f64..20.0, rho in 0.0f64..50.0, beta in 0.5f64..5.0) {
        let p = LorenzParams::new(sigma, rho, beta).unwrap();
        let s = [x, y, z];
        // each diagonal entry is linear in its own variable, so a wide
        // step has no truncation error and little cancellation
        let h = 1.0;
        let mut div = 0.0;
        for i in 0..3 {
            let (mut sp, mut sm) = (s, s);
            sp[i] += h;
            sm[i] -= h;
            div += (lorenz_field(sp, &p)[i] - lorenz_field(sm, &p)[i]) / (2.0 * h);
        }
        prop_assert!((div - p.divergence()).abs() < 1e-10, "{} vs {}", div, p.divergence());
    }

    #[test]
    fn lorenz_fixed_points_vanish(sigma in 0.1f64..20.0, rho in 1.01f64..100.0, beta in 0.1f64..10.0) {
        let p = LorenzParams::new(sigma, rho, beta).unwrap();
        let pts = p.fixed_points();
        prop_assert_eq!(pts.len(), 3);
        for c in pts {
            prop_assert!(lorenz_field(c, &p).iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn constant_derivative_gives_its_log(c in prop_oneof![-3.0f64..-0.01, 0.01f64..3.0]) {
        let map = ScalarMap::new(move |x: f64, _a: f64| c * x).with_derivative(move |_x: f64, _a: f64| c);
        let est = lyapunov_1d(&map, 0.3, 0.0, 300, 20).unwrap();
        prop_assert_eq!(est.exponent, libm::log(c.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn single_exponential_recovery(c in 0.01f64..100.0, kappa in 0.05f64..1.0) {
        let t: Vec<f64> = (0..60).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = t.iter().map(|t| c * (kappa * t).exp()).collect();
        let fit = fit_asymptotic(&t, &y, 1.0).unwrap();
        prop_assert!((fit.c1 / c - 1.0).abs() < 1e-2, "{:?}", fit);
        prop_assert!((fit.kappa1 / kappa - 1.0).abs() < 1e-2, "{:?}", fit);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn separable_closed_form_residual(lambda in -2.0f64..2.0, beta in -2.0f64..2.0, gamma in -2.0f64..2.0,
                                      omega in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
                                      alpha0 in -3.0f64..3.0, delta0 in -3.0f64..3.0,
                                      c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let p = ClosedFormParams { lambda, beta, gamma, omega, delta_f: 0.0, alpha0, delta0, c1, c2, c3: 0.0 };
        let grid = TimeGrid::new(0.0, 5.0, 1e-3).unwrap();
        let rep = closed_form_residual(&p, &grid, ResidualTarget::Separable).unwrap();
        prop_assert!(rep.max_residual < 1e-8, "{:?}", rep);
        let rep = closed_form_residual(&ClosedFormParams { beta: 0.0, ..p }, &grid, ResidualTarget::Separable).unwrap();
        prop_assert!(rep.max_residual < 1e-10, "{:?}", rep);
    }

    #[test]
    fn w_scales_with_r_max_cubed(c1 in 0.01f64..2.0, k1 in -0.5f64..0.5, tau in 0.0f64..10.0,
                                 a in 0.5f64..20.0, b in 0.5f64..20.0, curvature in -1.0f64..1.0) {
        let fit = AsymptoticFit::new(c1, k1, 0.0, 0.0).unwrap();
        let wa = w_functional(&fit, tau, &EntropySpec { r_max: a, curvature, ..Default::default() }).unwrap();
        let wb = w_functional(&fit, tau, &EntropySpec { r_max: b, curvature, ..Default::default() }).unwrap();
        prop_assume!(wb.w != 0.0);
        prop_assert!((wa.w / wb.w - (a / b).powi(3)).abs() < 1e-12 * (a / b).powi(3));
    }
}

#[test]
fn sensitivity_self_pair_is_bitwise_zero() {
    let s0 = SphericalState::new(0.1, 0.2, 4.24).unwrap();
    let grid = TimeGrid::new(0.0, 20.0, 0.01).unwrap();
    for p in [SetlerParams::CASE_ONE, SetlerParams::CHAOS_STUDY, SetlerParams::ATTRACTOR] {
        let d = sensitivity_pair(&p, &p, s0, &grid);
        assert!(d.separation.iter().all(|x| x.to_bits() == 0));
    }
}

#[test]
fn attractor_sampling_is_deterministic() {
    let grid = TimeGrid::new(0.0, 30.0, 0.01).unwrap();
    let sys = AttractorSystem::Lorenz(LorenzParams::CLASSIC);
    let a = attractor_sample(sys, [1.0; 3], &grid, 5.0).unwrap();
    let b = attractor_sample(sys, [1.0; 3], &grid, 5.0).unwrap();
    let bits = |c: &setler_core::reference::PointCloud| c.points.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}
