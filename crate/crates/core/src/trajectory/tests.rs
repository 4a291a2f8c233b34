use super::*;
use crate::parts::{default_test_part, sharp_rectangle};
use crate::profile::{plan_profile, MotionLimits};
use crate::trajectory::config::{NormalConfig, PlannerConfig, PoseConfig, SpeedFrame};
use crate::transform::RobotPathSample;
use nalgebra::Vector3;

fn identity_pose_config() -> PoseConfig {
    PoseConfig {
        mount_position: [0.0, 0.0, 0.0],
        mount_rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        tool_position: [0.0, 0.0, 0.0],
        tool_rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    }
}

fn test_config() -> PlannerConfig {
    let mut cfg = PlannerConfig::example();
    cfg.num_samples = 400;
    cfg.num_ctrl = 60;
    cfg
}

fn line_polygon(length: f64, n: usize) -> crate::spline::DataPolygon {
    let pts: Vec<Vector3<f64>> = (0..n)
        .map(|k| Vector3::new(length * k as f64 / (n - 1) as f64, 0.0, 0.0))
        .collect();
    crate::spline::DataPolygon::from_points(pts).unwrap()
}

#[test]
fn unwrap_removes_two_pi_jumps() {
    let pi = std::f64::consts::PI;
    let mut vals = vec![3.0, -3.1, 3.1, -3.0];
    unwrap_angle_sequence(&mut vals);
    for w in vals.windows(2) {
        assert!((w[1] - w[0]).abs() <= pi, "{vals:?}");
    }
    assert!((vals[1] - (2.0 * pi - 3.1)).abs() <= 1e-12);
}

#[test]
fn unwrap_leaves_smooth_sequences_alone() {
    let orig: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
    let mut vals = orig.clone();
    unwrap_angle_sequence(&mut vals);
    assert_eq!(vals, orig);
}

fn smooth_synthetic_path(n: usize) -> Vec<RobotPathSample> {
    (0..n)
        .map(|k| {
            let sigma = 3.0 * k as f64 / (n - 1) as f64;
            RobotPathSample {
                sigma,
                position: Vector3::new(sigma.cos(), sigma.sin(), 0.1 * sigma),
                rotation: taitbryan_to_rotation(&TaitBryanAngles::new(
                    0.3 * sigma.sin(),
                    0.2 * sigma.cos(),
                    0.5 * sigma,
                )),
            }
        })
        .collect()
}

#[test]
fn pose_spline_interpolation_reproduces_samples() {
    let path = smooth_synthetic_path(120);
    let fit = fit_pose_splines(&path, 5, path.len()).unwrap();
    assert!(fit.max_position_dev <= 1e-8, "{}", fit.max_position_dev);
    assert!(fit.max_angle_dev <= 1e-8, "{}", fit.max_angle_dev);
}

#[test]
fn pose_spline_fit_requires_monotone_sigma() {
    let mut path = smooth_synthetic_path(20);
    path[10].sigma = path[9].sigma;
    assert!(matches!(
        fit_pose_splines(&path, 5, 10),
        Err(TrajectoryError::NonMonotonicSigma)
    ));
}

#[test]
fn pose_spline_fit_requires_two_samples() {
    let path = smooth_synthetic_path(1);
    assert!(matches!(
        fit_pose_splines(&path, 5, 1),
        Err(TrajectoryError::TooFewSamples { .. })
    ));
}

#[test]
fn pose_splines_unwrap_gamma_across_the_branch_cut() {
    // gamma walks through +pi; without unwrapping the fit would chase a
    // 2*pi jump and the deviation check would explode.
    let n = 80;
    let path: Vec<RobotPathSample> = (0..n)
        .map(|k| {
            let sigma = k as f64 / (n - 1) as f64;
            let gamma = 2.5 + 1.5 * sigma; // crosses pi at sigma ~ 0.43
            RobotPathSample {
                sigma,
                position: Vector3::new(sigma, 0.0, 0.0),
                rotation: taitbryan_to_rotation(&TaitBryanAngles::new(0.0, 0.0, gamma)),
            }
        })
        .collect();
    let fit = fit_pose_splines(&path, 5, n).unwrap();
    assert!(fit.max_angle_dev <= 1e-8, "{}", fit.max_angle_dev);
    // Reconstructed rotations must match the inputs even past the cut.
    for s in &path {
        let rec = fit.splines.robot_sample(s.sigma).unwrap();
        assert!(rec.rotation.angle_to(&s.rotation) <= 1e-7);
    }
}

#[test]
fn detect_cusps_flags_square_corners_only() {
    let square = sharp_rectangle(0.12, 0.08, 400);
    let samples: Vec<(f64, Vector3<f64>)> = square
        .points()
        .iter()
        .enumerate()
        .map(|(k, p)| (k as f64, *p))
        .collect();
    let cusps = detect_cusps(&samples, 5.0_f64.to_radians());
    assert_eq!(cusps.len(), 4, "{cusps:?}");

    let rounded = default_test_part(400);
    let samples: Vec<(f64, Vector3<f64>)> = rounded
        .points()
        .iter()
        .enumerate()
        .map(|(k, p)| (k as f64, *p))
        .collect();
    assert!(detect_cusps(&samples, 5.0_f64.to_radians()).is_empty());
}

#[test]
fn detect_cusps_merges_runs_to_sharpest_sample() {
    // Two adjacent kinks: 30 deg then 90 deg; one cusp at the sharper one.
    let pts = [
        Vector3::new(0.0, 0.0, 0.0),
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(1.866, 0.5, 0.0),  // 30 deg turn at index 1
        Vector3::new(1.366, 1.366, 0.0), // ~90 deg turn at index 2
        Vector3::new(0.866, 2.232, 0.0),
    ];
    let samples: Vec<(f64, Vector3<f64>)> =
        pts.iter().enumerate().map(|(k, p)| (k as f64, *p)).collect();
    let cusps = detect_cusps(&samples, 5.0_f64.to_radians());
    assert_eq!(cusps, vec![2.0]);
}

#[test]
fn sample_trajectory_rejects_mismatched_profile() {
    let path = smooth_synthetic_path(60);
    let fit = fit_pose_splines(&path, 5, path.len()).unwrap();
    let limits = MotionLimits { v_max: 0.1, a_max: 1.0, j_max: 10.0 };
    let profile = plan_profile(1.0, limits).unwrap(); // domain spans 3.0
    let curve = crate::spline::fit_polygon(&line_polygon(1.0, 50), 0.0, 1.0, 3, 10)
        .unwrap()
        .0
        .curve;
    let ctx = ContactContext::arc_length_on_processing_path(
        &curve,
        RotationMatrix::identity(),
        vec![0.0, 3.0],
        vec![0.0, 1.0],
    )
    .unwrap();
    assert!(matches!(
        sample_trajectory(&fit.splines, &profile, &ctx, 100.0),
        Err(TrajectoryError::DomainMismatch { .. })
    ));
}

#[test]
fn straight_line_pipeline_cruises_at_v_max() {
    let polygon = line_polygon(0.3, 200);
    let mut cfg = test_config();
    cfg.num_samples = 200;
    cfg.num_ctrl = 30;
    cfg.setup = identity_pose_config();
    let out = run_pipeline(&polygon, &cfg).unwrap();
    assert!(out.report.passed, "{:?}", out.report.failures);

    let (c0, c1) = out.profile.cruise_window().unwrap();
    let v = cfg.limits.v_max;
    for s in out.samples.iter().filter(|s| s.t >= c0 && s.t <= c1) {
        // End effector retreats along -x while the part point at the TCP
        // moves along +x at the process speed.
        let lin = s.velocity.fixed_rows::<3>(0);
        assert!((lin - Vector3::new(-v, 0.0, 0.0)).norm() <= 1e-6, "t={}", s.t);
        assert!((s.tcp_velocity - Vector3::new(v, 0.0, 0.0)).norm() <= 1e-6);
        assert!(s.acceleration.fixed_rows::<3>(0).norm() <= 1e-6);
        assert!(s.angular_velocity.norm() <= 1e-9);
    }
}

#[test]
fn trajectory_starts_and_ends_at_rest() {
    let polygon = default_test_part(400);
    let cfg = test_config();
    let out = run_pipeline(&polygon, &cfg).unwrap();
    let first = out.samples.first().unwrap();
    let last = out.samples.last().unwrap();
    for s in [first, last] {
        assert_eq!(s.velocity.norm(), 0.0);
        assert_eq!(s.acceleration.norm(), 0.0);
        assert_eq!(s.angular_velocity.norm(), 0.0);
        assert_eq!(s.tcp_velocity.norm(), 0.0);
    }
    assert_eq!(last.t, out.profile.duration());
}

#[test]
fn derivatives_match_finite_differences_of_the_pose() {
    let polygon = default_test_part(400);
    let cfg = test_config();
    let out = run_pipeline(&polygon, &cfg).unwrap();
    let splines = &out.path.pose_fit.splines;
    let ctx = &out.path.context;
    let h = 1e-5;
    let t_total = out.profile.duration();
    for k in 1..20 {
        let t = t_total * k as f64 / 20.0;
        let t = t.min(t_total - 2.0 * h);
        let mid = sample_at(splines, &out.profile, ctx, t).unwrap();
        let plus = sample_at(splines, &out.profile, ctx, t + h).unwrap();
        let minus = sample_at(splines, &out.profile, ctx, t - h).unwrap();
        let fd_vel = (plus.pose - minus.pose) / (2.0 * h);
        let fd_acc = (plus.velocity - minus.velocity) / (2.0 * h);
        let fd_omega = (plus.angular_velocity - minus.angular_velocity) / (2.0 * h);
        assert!((mid.velocity - fd_vel).norm() <= 1e-4 * mid.velocity.norm().max(1.0), "t={t}");
        assert!((mid.acceleration - fd_acc).norm() <= 1e-3 * mid.acceleration.norm().max(1.0));
        assert!((mid.angular_acceleration - fd_omega).norm() <= 1e-3);
    }
}

#[test]
fn rounded_rectangle_gamma_sweeps_a_full_turn() {
    let polygon = default_test_part(600);
    let mut cfg = test_config();
    cfg.setup = identity_pose_config();
    let gen = generate_path(&polygon, &cfg).unwrap();
    let z0 = gen.pose_fit.splines.pose(gen.robot_path.first().unwrap().sigma).unwrap();
    let z1 = gen.pose_fit.splines.pose(gen.robot_path.last().unwrap().sigma).unwrap();
    // The tangent turns through a full loop; gamma must unwrap, not fold.
    assert!(((z1[5] - z0[5]).abs() - 2.0 * std::f64::consts::PI).abs() < 0.1);
    assert!(z0[4].abs() < 1e-9 && z1[4].abs() < 1e-9); // planar: beta = 0
}

#[test]
fn per_point_normals_match_constant_normal_for_planar_part() {
    let polygon = default_test_part(300);
    let mut cfg = test_config();
    cfg.num_samples = 300;
    let mut cfg_pp = cfg.clone();
    cfg_pp.normal = NormalConfig::PerPoint;
    let a = generate_path(&polygon, &cfg).unwrap();
    let b = generate_path(&polygon, &cfg_pp).unwrap();
    for (fa, fb) in a.frames.iter().zip(&b.frames) {
        assert!((fa.normal - fb.normal).norm() <= 1e-12);
    }
}

#[test]
fn per_point_normals_without_input_normals_is_an_input_error() {
    let polygon = line_polygon(0.2, 50);
    let mut cfg = test_config();
    cfg.num_samples = 50;
    cfg.num_ctrl = 10;
    cfg.normal = NormalConfig::PerPoint;
    let err = generate_path(&polygon, &cfg).unwrap_err();
    assert_eq!(err.stage, "frames");
}

#[test]
fn invalid_config_is_a_config_error() {
    let polygon = line_polygon(0.2, 50);
    let mut cfg = test_config();
    cfg.limits.v_max = -1.0;
    let err = run_pipeline(&polygon, &cfg).unwrap_err();
    assert_eq!(err.stage, "config");
}

#[test]
fn underdetermined_fit_is_a_fit_error() {
    let polygon = line_polygon(0.2, 20);
    let cfg = test_config(); // num_ctrl 60 > 20 points
    let err = run_pipeline(&polygon, &cfg).unwrap_err();
    assert_eq!(err.stage, "fit");
    assert!(err.message.contains("underdetermined"), "{}", err.message);
}

/// Gentle circular arc: the mapped robot path is smooth but its speed
/// relative to the processing parameter varies, so the end-effector
/// reparameterization actually has work to do.
fn gentle_arc_polygon(n: usize) -> crate::spline::DataPolygon {
    let r = 2.0;
    let pts: Vec<Vector3<f64>> = (0..n)
        .map(|k| {
            let th = 0.3 * k as f64 / (n - 1) as f64;
            Vector3::new(r * th.sin(), r * (1.0 - th.cos()), 0.0)
        })
        .collect();
    crate::spline::DataPolygon::from_points(pts).unwrap()
}

#[test]
fn end_effector_speed_frame_limits_the_flange() {
    let polygon = gentle_arc_polygon(300);
    let mut cfg = test_config();
    cfg.num_samples = 300;
    cfg.speed_frame = SpeedFrame::EndEffector;
    cfg.setup.mount_position = [0.1, 0.2, 0.05];
    let out = run_pipeline(&polygon, &cfg).unwrap();
    assert!(out.report.passed, "{:?}", out.report.failures);

    // The path parameter is end-effector arc length, so sigma covers the
    // robot path, not the processing path.
    assert!((out.report.sigma_span - out.report.path_length).abs() > 1e-4);

    // Never faster than v_max (gated by the report too), and at v_max
    // during cruise.
    let v = cfg.limits.v_max;
    for s in &out.samples {
        assert!(s.velocity.fixed_rows::<3>(0).norm() <= v + 1e-6, "t={}", s.t);
    }
    let (c0, c1) = out.profile.cruise_window().unwrap();
    for s in out.samples.iter().filter(|s| s.t >= c0 && s.t <= c1) {
        let speed = s.velocity.fixed_rows::<3>(0).norm();
        assert!((speed - v).abs() <= 2e-5, "t={} speed={speed}", s.t);
    }
}

#[test]
fn tcp_speed_frame_holds_process_speed_exactly() {
    let polygon = default_test_part(500);
    let mut cfg = test_config();
    cfg.num_samples = 500;
    let out = run_pipeline(&polygon, &cfg).unwrap();
    assert!(out.report.passed, "{:?}", out.report.failures);
    assert!(out.report.tcp_speed.has_cruise);
    assert!(out.report.tcp_speed.max_error <= 1e-6, "{}", out.report.tcp_speed.max_error);
    // Processing arc length is the path parameter, so the span matches the
    // measured length.
    assert!((out.report.sigma_span - out.report.path_length).abs() <= 1e-9);
}

#[test]
fn smoothing_trades_accuracy_for_smoothness() {
    let polygon = sharp_rectangle(0.12, 0.08, 500);
    let mut exact_cfg = test_config();
    exact_cfg.num_samples = 500;
    exact_cfg.num_ctrl = 120;
    let mut smooth_cfg = exact_cfg.clone();
    smooth_cfg.smoothing = true;
    smooth_cfg.smoothing_ctrl = 60;

    let exact = run_pipeline(&polygon, &exact_cfg).unwrap();
    let smooth = run_pipeline(&polygon, &smooth_cfg).unwrap();
    assert!(smooth.report.jerk_proxy_peak < exact.report.jerk_proxy_peak);
    assert!(
        smooth.report.fixed_tcp.max_position_drift > exact.report.fixed_tcp.max_position_drift
    );
}
