use affine_flow::diagnostics::ellipticity;
use affine_flow::flow::{normalize_area, FailureReason};
use affine_flow::record::write_csv;
use affine_flow::*;

/// Homothety factor of an ellipse with `ab = ab0` after time `t`:
/// `s_t = -s/(ab)^{2/3}` integrates to `λ = (1 - 4t/(3(ab0)^{2/3}))^{3/4}`.
fn ellipse_scale(ab0: f64, t: f64) -> f64 {
    (1.0 - 4.0 * t / (3.0 * ab0.powf(2.0 / 3.0))).powf(0.75)
}

#[test]
fn disk_radius_follows_the_exact_solution() {
    let ctrl = StepController::default();
    let r0: f64 = 1.3;
    let mut state = FlowState::new(make_disk(r0, 256).unwrap());
    let mut checked = 0;
    while state.is_running() && state.body.area() >= 10.0 * ctrl.area_floor {
        let exact = (r0.powf(4.0 / 3.0) - 4.0 * state.t / 3.0).powf(0.75);
        for &s in state.body.samples() {
            assert!((s - exact).abs() <= 1e-5 * exact, "t = {}", state.t);
        }
        checked += 1;
        for _ in 0..50 {
            state = step(&state, &ctrl);
        }
    }
    assert!(checked > 100);
}

#[test]
fn support_function_decreases_at_every_angle() {
    let ctrl = StepController::default();
    let mut state = FlowState::new(make_random_body(&RandomBodySpec::new(4, 8, 2.0, 0.2), 256).unwrap());
    for _ in 0..500 {
        let next = step(&state, &ctrl);
        for (a, b) in state.body.samples().iter().zip(next.body.samples()) {
            assert!(b < a);
        }
        state = next;
    }
}

#[test]
fn ellipse_shrinks_homothetically() {
    let ctrl = StepController::default();
    let (a, b) = (1.5, 0.8);
    let start = make_ellipse(a, b, 0.4, 256).unwrap();
    let mut state = FlowState::new(start.clone());
    for _ in 0..100 {
        state = step(&state, &ctrl);
    }
    let s0 = start.samples();
    let s = state.body.samples();
    // least-squares homothety factor, compared with the closed form
    let fit = s.iter().zip(s0).map(|(x, y)| x * y).sum::<f64>() / s0.iter().map(|y| y * y).sum::<f64>();
    let worst = s
        .iter()
        .zip(s0)
        .map(|(x, y)| (x - fit * y).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6);
    assert!((fit - ellipse_scale(a * b, state.t)).abs() <= 1e-6);
}

#[test]
fn normalized_flow_approaches_an_ellipse() {
    let ctrl = StepController::default();
    let body = make_random_body(&RandomBodySpec::new(1, 8, 2.0, 0.2), 256).unwrap();
    assert!(ellipticity(&body) > 1e-4);
    let a0 = body.area();
    let mut state = FlowState::new(body);
    while state.body.area() > 1e-3 * a0 {
        state = step(&state, &ctrl);
        assert!(state.is_running());
    }
    let normalized = normalize_area(&state.body).unwrap();
    assert!(ellipticity(&normalized) <= 1e-4);
}

#[test]
fn identical_inputs_give_identical_trajectories() {
    let ctrl = StepController::default();
    let body = make_random_body(&RandomBodySpec::new(9, 8, 2.0, 0.2), 256).unwrap();
    let csv = |out: &RunOutput| {
        let mut buf = Vec::new();
        write_csv(&out.trajectory, &mut buf).unwrap();
        buf
    };
    let opts = RunOptions::every(500);
    let first = run(body.clone(), &ctrl, &opts).unwrap();
    let second = run(body, &ctrl, &opts).unwrap();
    assert_eq!(csv(&first), csv(&second));
    assert_eq!(first.final_state.body.samples(), second.final_state.body.samples());
}

#[test]
fn recentering_moves_the_limit_point_to_the_origin() {
    let ctrl = StepController::default();
    let body = make_random_body(&RandomBodySpec::new(2, 8, 2.0, 0.2), 256).unwrap();
    let (centered, shift) = center_on_extinction_point(&body, &ctrl).unwrap();
    assert!(shift[0].hypot(shift[1]) > 1e-4);
    let out = run(centered, &ctrl, &RunOptions::every(usize::MAX)).unwrap();
    let p = out.final_state.body.steiner_point();
    let size = (out.final_state.body.area() / std::f64::consts::PI).sqrt();
    assert!(p[0].hypot(p[1]) <= 1e-3 * size);
    assert!((out.final_state.body.santalo() - 1.0).abs() <= 1e-4);
}

#[test]
fn tiny_step_cap_still_reaches_the_target_time() {
    let ctrl = StepController {
        dt_max: 1e-4,
        ..StepController::default()
    };
    let state = advance_to(&FlowState::new(make_disk(1.0, 64).unwrap()), &ctrl, 0.01).unwrap();
    assert_eq!(state.t, 0.01);
    assert!(!matches!(state.status, FlowStatus::Failed(FailureReason::NonFinite)));
}
