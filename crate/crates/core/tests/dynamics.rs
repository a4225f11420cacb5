use setler_core::continuous::{integrate, integrate_setler, SetlerField};
use setler_core::discrete::iterate_map;
use setler_core::{SetlerParams, SphericalState, TimeGrid};

/// Straight transcription of the map, independent of the library code path.
fn reference_map(mut y: [f64; 3], p: &SetlerParams, steps: usize) -> [f64; 3] {
    for n in 0..steps {
        let t = n as f64;
        let (a, d, r) = (y[0], y[1], y[2]);
        y = [
            a + p.lambda * a.sin() * d.cos() + p.beta * (p.omega * t).sin(),
            d + p.lambda * a.cos() * d.sin() + p.gamma * (p.omega * t).cos(),
            r + p.lambda * (d.sin() * a.cos()).powi(2) + p.delta_f * (p.omega * t).sin(),
        ];
    }
    y
}

#[test]
fn thousand_steps_match_reference_iteration() {
    let s0 = SphericalState::new(0.1, 0.2, 4.24).unwrap();
    for p in [SetlerParams::CHAOS_STUDY, SetlerParams::CASE_ONE] {
        let traj = iterate_map(s0, &p, 1000).unwrap();
        assert_eq!(traj.len(), 1001);
        let want = reference_map(s0.to_array(), &p, 1000);
        let got = traj.last().1.to_array();
        for i in 0..3 {
            assert!((got[i] - want[i]).abs() < 1e-9 * want[i].abs().max(1.0), "{got:?} vs {want:?}");
        }
    }
}

fn final_state(h: f64) -> [f64; 3] {
    let grid = TimeGrid::new(0.0, 1.0, h).unwrap();
    let s0 = SphericalState::new(0.1, 0.2, 0.3).unwrap();
    integrate_setler(s0, &grid, &SetlerParams::CASE_ONE).unwrap().last().1.to_array()
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn rk4_self_convergence_is_fourth_order() {
    let (a, b, c) = (final_state(0.02), final_state(0.01), final_state(0.005));
    let rate = (dist(a, b) / dist(b, c)).log2();
    assert!((rate - 4.0).abs() < 0.3, "rate {rate}");
}

#[test]
fn simulate_grid_row_count() {
    let grid = TimeGrid::new(0.0, 10.0, 0.01).unwrap();
    let traj = integrate(&SetlerField::new(SetlerParams::CASE_ONE), SphericalState::new(0.1, 0.2, 0.3).unwrap(), &grid).unwrap();
    assert_eq!(traj.len(), 1001);
    assert!((traj.last().0 - 10.0).abs() < 1e-12);
}
