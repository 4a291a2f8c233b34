//! End-to-end planning pipeline: data polygon in, validated time-stamped
//! trajectory out.
//!
//! Stages: fit the processing path, reparameterize by arc length, build
//! process orientation frames, invert around the fixed tool, fit pose
//! splines over the path parameter, plan the scalar time law and sample.
//! Every run ends with a self-check of the fixed-TCP property, the motion
//! limits and the fit quality, collected in a [`ValidationReport`].

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::frame::{process_frame_from_derivative, ProcessFrameSample};
use crate::profile::{plan_profile, ScalarProfile};
use crate::spline::{arc_length_table, fit_polygon, ArcLengthTable, BSplineCurve, DataPolygon};
use crate::transform::{robot_pose, verify_fixed_tcp, FixedTcpReport, RobotPathSample, SetupConfig};

use super::config::{NormalConfig, PlannerConfig, SpeedFrame};
use super::{
    detect_cusps, fit_pose_splines, sample_trajectory, ContactContext, PoseSplineFit,
    TrajectorySample,
};

/// Error from one named pipeline stage. Everything in here is an input or
/// data problem, not a tolerance failure; tolerance failures land in the
/// report instead.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

impl PipelineError {
    fn new(stage: &'static str, err: impl std::fmt::Display) -> Self {
        Self { stage, message: err.to_string() }
    }
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} stage: {}", self.stage, self.message)
    }
}

impl std::error::Error for PipelineError {}

/// Geometry part of a pipeline run: everything up to (but excluding) the
/// time law.
#[derive(Debug, Clone)]
pub struct PathGeneration {
    /// Processing-path spline over the internal parameter `u` in [0, 1].
    pub curve: BSplineCurve,
    /// Arc-length map of `curve`.
    pub arc: ArcLengthTable,
    /// Process orientation frames; `sigma` is processing-path arc length.
    pub frames: Vec<ProcessFrameSample>,
    /// End-effector poses; `sigma` is the chosen path parameter.
    pub robot_path: Vec<RobotPathSample>,
    /// Pose splines fitted to `robot_path`, with deviation diagnostics.
    pub pose_fit: PoseSplineFit,
    /// Contact-velocity evaluation context for the sampled trajectory.
    pub context: ContactContext,
    /// Processing-path fit residuals (weighted RMS / max, in meters).
    pub path_residual_rms: f64,
    pub path_residual_max: f64,
    pub setup: SetupConfig,
}

/// Residuals of the two fits in the pipeline.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitResiduals {
    /// Processing-path fit, weighted RMS over the input points (m).
    pub path_rms: f64,
    /// Processing-path fit, largest input-point residual (m).
    pub path_max: f64,
    /// Pose splines, largest position deviation at the path samples (m).
    pub pose_position_max: f64,
    /// Pose splines, largest angle deviation at the path samples (rad).
    pub pose_angle_max: f64,
}

/// Limit minus observed peak for each derivative of the path parameter;
/// negative means the limit was exceeded.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LimitMargins {
    pub velocity: f64,
    pub acceleration: f64,
    pub jerk: f64,
}

/// Process-speed check. With speed frame `tcp` the TCP contact speed must
/// equal the target during the cruise phase; with `end_effector` the
/// end-effector speed must never exceed the target anywhere.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TcpSpeedReport {
    /// Commanded process speed (m/s).
    pub target: f64,
    /// `tcp`: largest |speed - target| inside the cruise window.
    /// `end_effector`: largest speed overshoot above the target (0 if the
    /// speed stays below it).
    pub max_error: f64,
    /// Whether the profile has a cruise phase at all.
    pub has_cruise: bool,
}

/// Self-check summary written at the end of every pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub speed_frame: SpeedFrame,
    pub smoothing: bool,
    /// Processing-path length (m).
    pub path_length: f64,
    /// Displacement covered by the time law (path-parameter units).
    pub sigma_span: f64,
    /// Trajectory duration (s).
    pub duration: f64,
    pub fixed_tcp: FixedTcpReport,
    pub fit_residuals: FitResiduals,
    pub limit_margins: LimitMargins,
    pub tcp_speed: TcpSpeedReport,
    /// Largest ||delta linear acceleration|| / delta t between adjacent
    /// output samples; finite-difference stand-in for the Cartesian jerk.
    pub jerk_proxy_peak: f64,
    /// Path parameters where the sampled robot path kinks sharply.
    pub cusps: Vec<f64>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub path: PathGeneration,
    pub profile: ScalarProfile,
    pub samples: Vec<TrajectorySample>,
    pub report: ValidationReport,
}

/// Surface normal at internal parameter `u`, per the normal configuration.
fn normal_at(
    normal: &NormalConfig,
    polygon: &DataPolygon,
    params: &[f64],
    u: f64,
) -> Result<Vector3<f64>, PipelineError> {
    match normal {
        NormalConfig::Constant { vector } => {
            Ok(Vector3::from_column_slice(vector).normalize())
        }
        NormalConfig::PerPoint => {
            let normals = polygon.normals().ok_or_else(|| {
                PipelineError::new("frames", "normal mode per_point requires input normals")
            })?;
            let hi = params.partition_point(|&p| p <= u).clamp(1, params.len() - 1);
            let lo = hi - 1;
            let span = params[hi] - params[lo];
            let w = if span > 0.0 { (u - params[lo]) / span } else { 0.0 };
            let n = normals[lo] * (1.0 - w) + normals[hi] * w;
            let len = n.norm();
            if len < 1e-9 {
                return Err(PipelineError::new(
                    "frames",
                    format!("interpolated surface normal vanishes near u = {u}"),
                ));
            }
            Ok(n / len)
        }
    }
}

/// Runs the geometric half of the pipeline: fit, frames, fixed-TCP
/// inversion and pose splines.
pub fn generate_path(
    polygon: &DataPolygon,
    config: &PlannerConfig,
) -> Result<PathGeneration, PipelineError> {
    config.validate().map_err(|e| PipelineError::new("config", e))?;
    let setup = config.setup.to_setup().map_err(|e| PipelineError::new("config", e))?;

    let (fit, params, clean) = fit_polygon(polygon, 0.0, 1.0, config.degree, config.num_ctrl)
        .map_err(|e| PipelineError::new("fit", e))?;
    let curve = fit.curve;
    let arc = arc_length_table(&curve, config.arc_samples)
        .map_err(|e| PipelineError::new("fit", e))?;
    let length = arc.length();

    // Sample the path uniformly in processing arc length.
    let n = config.num_samples;
    let derivative = curve.derivative_curve(1).map_err(|e| PipelineError::new("fit", e))?;
    let mut frames = Vec::with_capacity(n);
    let mut u_samples = Vec::with_capacity(n);
    let mut s_samples = Vec::with_capacity(n);
    for k in 0..n {
        let s = length * k as f64 / (n - 1) as f64;
        let u = arc.u_at(s);
        let ns = normal_at(&config.normal, &clean, params.sigma(), u)?;
        let mut frame = process_frame_from_derivative(&curve, &derivative, u, &ns)
            .map_err(|e| PipelineError::new("frames", e))?;
        frame.sigma = s;
        frames.push(frame);
        u_samples.push(u);
        s_samples.push(s);
    }
    if u_samples.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PipelineError::new(
            "frames",
            "arc-length reparameterization is not strictly increasing",
        ));
    }

    let mut robot_path: Vec<RobotPathSample> =
        frames.iter().map(|f| robot_pose(f, &setup)).collect();

    let pose_ctrl = if config.smoothing { config.smoothing_ctrl } else { n };

    // Choose the path parameter: processing arc length (tcp) keeps the
    // process speed exact; end-effector arc length puts the limits on the
    // robot flange instead, found with a provisional position fit.
    let context = match config.speed_frame {
        SpeedFrame::Tcp => {
            ContactContext::arc_length_on_processing_path(
                &curve,
                setup.mount_rotation,
                s_samples.clone(),
                u_samples.clone(),
            )
            .map_err(|e| PipelineError::new("transform", e))?
        }
        SpeedFrame::EndEffector => {
            let positions: Vec<Vector3<f64>> = robot_path.iter().map(|p| p.position).collect();
            let mut chord = Vec::with_capacity(n);
            chord.push(0.0);
            for w in positions.windows(2) {
                let step = (w[1] - w[0]).norm();
                if step <= 0.0 {
                    return Err(PipelineError::new(
                        "transform",
                        "robot path stalls; end_effector speed frame needs a moving end effector",
                    ));
                }
                chord.push(chord.last().unwrap() + step);
            }
            let provisional =
                crate::spline::fit_spline(&chord, &positions, None, config.degree, pose_ctrl)
                    .map_err(|e| PipelineError::new("transform", e))?;
            let robot_arc = arc_length_table(&provisional.curve, config.arc_samples)
                .map_err(|e| PipelineError::new("transform", e))?;
            let sigma: Vec<f64> = chord.iter().map(|&c| robot_arc.s_at(c)).collect();
            if sigma.windows(2).any(|w| w[0] >= w[1]) {
                return Err(PipelineError::new(
                    "transform",
                    "end-effector arc-length parameter is not strictly increasing",
                ));
            }
            for (pose, &s) in robot_path.iter_mut().zip(&sigma) {
                pose.sigma = s;
            }
            ContactContext::general(
                &curve,
                setup.mount_rotation,
                sigma,
                u_samples.clone(),
                s_samples.clone(),
            )
            .map_err(|e| PipelineError::new("transform", e))?
        }
    };

    let pose_fit = fit_pose_splines(&robot_path, config.degree, pose_ctrl)
        .map_err(|e| PipelineError::new("pose-fit", e))?;

    Ok(PathGeneration {
        curve,
        arc,
        frames,
        robot_path,
        pose_fit,
        context,
        path_residual_rms: fit.residual_rms,
        path_residual_max: fit.max_error,
        setup,
    })
}

/// Full pipeline: geometry, time law, sampling and the validation report.
pub fn run_pipeline(
    polygon: &DataPolygon,
    config: &PlannerConfig,
) -> Result<PipelineOutput, PipelineError> {
    let path = generate_path(polygon, config)?;

    let (a, b) = path.pose_fit.splines.domain();
    let profile = plan_profile(b - a, config.limits)
        .map_err(|e| PipelineError::new("profile", e))?;

    let samples = sample_trajectory(&path.pose_fit.splines, &profile, &path.context, config.output_rate)
        .map_err(|e| PipelineError::new("sampling", e))?;

    let report = build_report(&path, &profile, &samples, config)
        .map_err(|e| PipelineError::new("validation", e))?;

    Ok(PipelineOutput { path, profile, samples, report })
}

/// Rate of the dense profile sweep in the limit check (Hz).
const LIMIT_CHECK_RATE: f64 = 10_000.0;

fn build_report(
    path: &PathGeneration,
    profile: &ScalarProfile,
    samples: &[TrajectorySample],
    config: &PlannerConfig,
) -> Result<ValidationReport, Box<dyn std::error::Error>> {
    let tol = &config.tolerances;
    let mut failures = Vec::new();

    // Fixed-TCP property: exact frames against the spline-reconstructed
    // poses actually commanded to the robot.
    let mut pairs = Vec::with_capacity(path.frames.len());
    for (frame, pose) in path.frames.iter().zip(&path.robot_path) {
        let reconstructed = path.pose_fit.splines.robot_sample(pose.sigma)?;
        pairs.push((frame.clone(), reconstructed));
    }
    let fixed_tcp = verify_fixed_tcp(&pairs, &path.setup);
    if fixed_tcp.max_position_drift > tol.fixed_tcp_position {
        failures.push(format!(
            "fixed-tcp position drift {:.3e} m exceeds {:.1e} m",
            fixed_tcp.max_position_drift, tol.fixed_tcp_position
        ));
    }
    if fixed_tcp.max_orientation_drift > tol.fixed_tcp_orientation {
        failures.push(format!(
            "fixed-tcp orientation drift {:.3e} rad exceeds {:.1e} rad",
            fixed_tcp.max_orientation_drift, tol.fixed_tcp_orientation
        ));
    }

    let fit_residuals = FitResiduals {
        path_rms: path.path_residual_rms,
        path_max: path.path_residual_max,
        pose_position_max: path.pose_fit.max_position_dev,
        pose_angle_max: path.pose_fit.max_angle_dev,
    };
    if fit_residuals.pose_position_max > tol.fit_position {
        failures.push(format!(
            "pose-spline position deviation {:.3e} m exceeds {:.1e} m",
            fit_residuals.pose_position_max, tol.fit_position
        ));
    }
    if fit_residuals.pose_angle_max > tol.fit_orientation {
        failures.push(format!(
            "pose-spline angle deviation {:.3e} rad exceeds {:.1e} rad",
            fit_residuals.pose_angle_max, tol.fit_orientation
        ));
    }

    // Dense sweep of the closed-form time law against the limits.
    let limits = profile.limits();
    let steps = (profile.duration() * LIMIT_CHECK_RATE).ceil() as usize;
    let (mut v_peak, mut a_peak, mut j_peak) = (0.0_f64, 0.0_f64, 0.0_f64);
    for k in 0..=steps {
        let t = (profile.duration() * k as f64 / steps as f64).min(profile.duration());
        let s = profile.eval(t)?;
        v_peak = v_peak.max(s.velocity.abs());
        a_peak = a_peak.max(s.acceleration.abs());
        j_peak = j_peak.max(s.jerk.abs());
    }
    let limit_margins = LimitMargins {
        velocity: limits.v_max - v_peak,
        acceleration: limits.a_max - a_peak,
        jerk: limits.j_max - j_peak,
    };
    for (name, margin) in [
        ("velocity", limit_margins.velocity),
        ("acceleration", limit_margins.acceleration),
        ("jerk", limit_margins.jerk),
    ] {
        if margin < -tol.limit_slack {
            failures.push(format!("{name} limit exceeded by {:.3e}", -margin));
        }
    }

    let mut tcp_speed = TcpSpeedReport {
        target: limits.v_max,
        max_error: 0.0,
        has_cruise: profile.has_cruise(),
    };
    match config.speed_frame {
        SpeedFrame::Tcp => {
            // The TCP contact speed must hold the target inside the cruise
            // window.
            if let Some((c0, c1)) = profile.cruise_window() {
                for s in samples.iter().filter(|s| s.t >= c0 && s.t <= c1) {
                    let err = (s.tcp_velocity.norm() - limits.v_max).abs();
                    tcp_speed.max_error = tcp_speed.max_error.max(err);
                }
                if tcp_speed.max_error > tol.tcp_speed {
                    failures.push(format!(
                        "TCP speed error {:.3e} m/s exceeds {:.1e} m/s during cruise",
                        tcp_speed.max_error, tol.tcp_speed
                    ));
                }
            }
        }
        SpeedFrame::EndEffector => {
            // The end-effector speed must never exceed the limit, ramps
            // included.
            for s in samples {
                let over = s.velocity.fixed_rows::<3>(0).norm() - limits.v_max;
                tcp_speed.max_error = tcp_speed.max_error.max(over);
            }
            tcp_speed.max_error = tcp_speed.max_error.max(0.0);
            if tcp_speed.max_error > tol.tcp_speed {
                failures.push(format!(
                    "end-effector speed exceeds v_max by {:.3e} m/s (allowed {:.1e})",
                    tcp_speed.max_error, tol.tcp_speed
                ));
            }
        }
    }

    let mut jerk_proxy_peak = 0.0_f64;
    for w in samples.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt > 0.0 {
            let da = (w[1].acceleration.fixed_rows::<3>(0)
                - w[0].acceleration.fixed_rows::<3>(0))
            .norm();
            jerk_proxy_peak = jerk_proxy_peak.max(da / dt);
        }
    }

    let position_samples: Vec<(f64, Vector3<f64>)> =
        path.robot_path.iter().map(|p| (p.sigma, p.position)).collect();
    let cusps = detect_cusps(&position_samples, config.cusp_threshold_deg.to_radians());

    let passed = failures.is_empty();
    Ok(ValidationReport {
        speed_frame: config.speed_frame,
        smoothing: config.smoothing,
        path_length: path.arc.length(),
        sigma_span: profile.displacement(),
        duration: profile.duration(),
        fixed_tcp,
        fit_residuals,
        limit_margins,
        tcp_speed,
        jerk_proxy_peak,
        cusps,
        passed,
        failures,
    })
}
