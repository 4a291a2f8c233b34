//! Trajectory assembly: pose splines over the path parameter, time-stamped
//! sampling via the scalar profile, cusp detection and the end-to-end
//! planning pipeline.

mod config;
mod pipeline;

pub use config::{NormalConfig, PlannerConfig, PoseConfig, SpeedFrame, Tolerances};
pub use pipeline::{
    generate_path, run_pipeline, FitResiduals, LimitMargins, PathGeneration, PipelineError,
    PipelineOutput, TcpSpeedReport, ValidationReport,
};

use nalgebra::{SVector, Vector3};
use thiserror::Error;

use crate::frame::{
    euler_accel_to_angular_acceleration, euler_rate_to_angular_velocity, rotation_to_taitbryan,
    taitbryan_to_rotation, FrameError, RotationMatrix, TaitBryanAngles,
};
use crate::interp::MonotoneCubic;
use crate::profile::{ProfileError, ScalarProfile};
use crate::spline::{fit_spline, BSpline, BSplineCurve, SplineError};
use crate::transform::RobotPathSample;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("profile displacement {profile} does not match spline domain length {domain}")]
    DomainMismatch { profile: f64, domain: f64 },
    #[error("path parameter must be strictly increasing across samples")]
    NonMonotonicSigma,
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
}

/// Add multiples of 2*pi so consecutive values stay within pi of each other.
/// Differentiable angle splines need jump-free data.
pub fn unwrap_angle_sequence(values: &mut [f64]) {
    for i in 1..values.len() {
        let mut v = values[i];
        while v - values[i - 1] > std::f64::consts::PI {
            v -= 2.0 * std::f64::consts::PI;
        }
        while v - values[i - 1] < -std::f64::consts::PI {
            v += 2.0 * std::f64::consts::PI;
        }
        values[i] = v;
    }
}

/// Six scalar splines over the path parameter sharing one knot vector:
/// three position components of the end effector and three unwrapped
/// Tait-Bryan angles. First and second derivative curves are precomputed.
#[derive(Debug, Clone)]
pub struct PoseSplines {
    spline: BSpline<6>,
    d1: BSpline<6>,
    d2: BSpline<6>,
}

impl PoseSplines {
    pub fn new(spline: BSpline<6>) -> Result<Self, TrajectoryError> {
        let d1 = spline.derivative_curve(1)?;
        let d2 = spline.derivative_curve(2)?;
        Ok(Self { spline, d1, d2 })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.spline.domain()
    }

    pub fn spline(&self) -> &BSpline<6> {
        &self.spline
    }

    /// `[r_0E; phi_0E]` at `sigma`.
    pub fn pose(&self, sigma: f64) -> Result<SVector<f64, 6>, TrajectoryError> {
        Ok(self.spline.evaluate(sigma)?)
    }

    /// Pose plus first and second sigma-derivatives.
    pub fn with_derivatives(
        &self,
        sigma: f64,
    ) -> Result<(SVector<f64, 6>, SVector<f64, 6>, SVector<f64, 6>), TrajectoryError> {
        Ok((
            self.spline.evaluate(sigma)?,
            self.d1.evaluate(sigma)?,
            self.d2.evaluate(sigma)?,
        ))
    }

    /// Reconstructed end-effector pose sample at `sigma`.
    pub fn robot_sample(&self, sigma: f64) -> Result<RobotPathSample, TrajectoryError> {
        let z = self.pose(sigma)?;
        let angles = TaitBryanAngles::new(z[3], z[4], z[5]);
        Ok(RobotPathSample {
            sigma,
            position: Vector3::new(z[0], z[1], z[2]),
            rotation: taitbryan_to_rotation(&angles),
        })
    }
}

/// Pose splines plus fit deviation diagnostics.
#[derive(Debug, Clone)]
pub struct PoseSplineFit {
    pub splines: PoseSplines,
    /// Largest position deviation at the fit samples (m).
    pub max_position_dev: f64,
    /// Largest angle deviation at the fit samples (rad).
    pub max_angle_dev: f64,
}

/// Least-squares fit of six pose splines to a robot path.
///
/// Angle columns are unwrapped before fitting; gimbal lock in any sample is
/// a hard error.
pub fn fit_pose_splines(
    path: &[RobotPathSample],
    degree: usize,
    num_ctrl: usize,
) -> Result<PoseSplineFit, TrajectoryError> {
    if path.len() < 2 {
        return Err(TrajectoryError::TooFewSamples { need: 2, got: path.len() });
    }
    if path.windows(2).any(|w| w[0].sigma >= w[1].sigma) {
        return Err(TrajectoryError::NonMonotonicSigma);
    }
    let sigma: Vec<f64> = path.iter().map(|s| s.sigma).collect();
    let mut alpha = Vec::with_capacity(path.len());
    let mut beta = Vec::with_capacity(path.len());
    let mut gamma = Vec::with_capacity(path.len());
    for s in path {
        let a = rotation_to_taitbryan(&s.rotation)?;
        alpha.push(a.alpha);
        beta.push(a.beta);
        gamma.push(a.gamma);
    }
    unwrap_angle_sequence(&mut alpha);
    unwrap_angle_sequence(&mut beta);
    unwrap_angle_sequence(&mut gamma);

    let values: Vec<SVector<f64, 6>> = path
        .iter()
        .enumerate()
        .map(|(k, s)| {
            SVector::<f64, 6>::from_column_slice(&[
                s.position.x,
                s.position.y,
                s.position.z,
                alpha[k],
                beta[k],
                gamma[k],
            ])
        })
        .collect();

    let fit = fit_spline(&sigma, &values, None, degree, num_ctrl)?;
    let splines = PoseSplines::new(fit.curve)?;

    let mut max_position_dev: f64 = 0.0;
    let mut max_angle_dev: f64 = 0.0;
    for (k, &s) in sigma.iter().enumerate() {
        let z = splines.pose(s)?;
        let dp = (z.fixed_rows::<3>(0) - values[k].fixed_rows::<3>(0)).norm();
        let da = (z.fixed_rows::<3>(3) - values[k].fixed_rows::<3>(3)).norm();
        max_position_dev = max_position_dev.max(dp);
        max_angle_dev = max_angle_dev.max(da);
    }

    Ok(PoseSplineFit { splines, max_position_dev, max_angle_dev })
}

/// Per-sample data needed to evaluate the velocity of the part point
/// currently at the TCP.
#[derive(Debug, Clone)]
pub struct ContactContext {
    mount_rotation: RotationMatrix,
    processing_derivative: BSplineCurve,
    u_of_sigma: MonotoneCubic,
    /// |d r_PF / d sigma|: exactly one when sigma is arc length along the
    /// processing path, otherwise interpolated from sampled arc lengths.
    speed_scale: SpeedScale,
}

#[derive(Debug, Clone)]
enum SpeedScale {
    Unit,
    Interp(MonotoneCubic),
}

impl ContactContext {
    /// `sigma` is arc length along the processing path (speed frame `tcp`).
    pub fn arc_length_on_processing_path(
        curve: &BSplineCurve,
        mount_rotation: RotationMatrix,
        sigma_samples: Vec<f64>,
        u_samples: Vec<f64>,
    ) -> Result<Self, TrajectoryError> {
        Ok(Self {
            mount_rotation,
            processing_derivative: curve.derivative_curve(1)?,
            u_of_sigma: MonotoneCubic::new(sigma_samples, u_samples),
            speed_scale: SpeedScale::Unit,
        })
    }

    /// `sigma` is some other parameter (speed frame `end_effector`);
    /// `processing_arc` gives the processing-path arc length at each sample.
    pub fn general(
        curve: &BSplineCurve,
        mount_rotation: RotationMatrix,
        sigma_samples: Vec<f64>,
        u_samples: Vec<f64>,
        processing_arc: Vec<f64>,
    ) -> Result<Self, TrajectoryError> {
        Ok(Self {
            mount_rotation,
            processing_derivative: curve.derivative_curve(1)?,
            u_of_sigma: MonotoneCubic::new(sigma_samples.clone(), u_samples),
            speed_scale: SpeedScale::Interp(MonotoneCubic::new(sigma_samples, processing_arc)),
        })
    }

    /// Velocity of the part point currently at the TCP, in inertial axes:
    /// the part rotation carries the part-frame path tangent, scaled by
    /// `|d r_PF / d sigma| * sigma_dot`.
    pub fn contact_velocity(
        &self,
        end_effector_rotation: &RotationMatrix,
        sigma: f64,
        sigma_dot: f64,
    ) -> Result<Vector3<f64>, TrajectoryError> {
        if sigma_dot == 0.0 {
            return Ok(Vector3::zeros());
        }
        let u = self.u_of_sigma.eval(sigma);
        let deriv = self.processing_derivative.evaluate(u)?;
        let norm = deriv.norm();
        if norm == 0.0 {
            return Ok(Vector3::zeros());
        }
        let scale = match &self.speed_scale {
            SpeedScale::Unit => 1.0,
            SpeedScale::Interp(arc) => arc.eval_derivative(sigma),
        };
        let dr_dsigma = deriv / norm * scale;
        let part_rotation = *end_effector_rotation * self.mount_rotation.transpose();
        Ok(part_rotation.rotate(&dr_dsigma) * sigma_dot)
    }
}

/// One time-stamped sample of the workspace trajectory.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub t: f64,
    /// Pose `z_E = [r_0E; phi_0E]` (3 m + 3 rad).
    pub pose: SVector<f64, 6>,
    /// `z_E' = (dz/dsigma) sigma_dot`.
    pub velocity: SVector<f64, 6>,
    /// `z_E'' = (d²z/dsigma²) sigma_dot² + (dz/dsigma) sigma_ddot`.
    pub acceleration: SVector<f64, 6>,
    pub angular_velocity: Vector3<f64>,
    pub angular_acceleration: Vector3<f64>,
    /// Velocity of the part point currently at the TCP (m/s).
    pub tcp_velocity: Vector3<f64>,
}

/// Evaluates the trajectory at one time instant.
pub fn sample_at(
    splines: &PoseSplines,
    profile: &ScalarProfile,
    ctx: &ContactContext,
    t: f64,
) -> Result<TrajectorySample, TrajectoryError> {
    let (a, b) = splines.domain();
    let p = profile.eval(t)?;
    let sigma = (a + p.position).clamp(a, b);
    let (z, dz, ddz) = splines.with_derivatives(sigma)?;
    let velocity = dz * p.velocity;
    let acceleration = ddz * (p.velocity * p.velocity) + dz * p.acceleration;

    let angles = TaitBryanAngles::new(z[3], z[4], z[5]);
    let rates = Vector3::new(velocity[3], velocity[4], velocity[5]);
    let accels = Vector3::new(acceleration[3], acceleration[4], acceleration[5]);
    let angular_velocity = euler_rate_to_angular_velocity(&angles, &rates);
    let angular_acceleration = euler_accel_to_angular_acceleration(&angles, &rates, &accels);

    let rotation = taitbryan_to_rotation(&angles);
    let tcp_velocity = ctx.contact_velocity(&rotation, sigma, p.velocity)?;

    Ok(TrajectorySample {
        t,
        pose: z,
        velocity,
        acceleration,
        angular_velocity,
        angular_acceleration,
        tcp_velocity,
    })
}

/// Samples the trajectory at a fixed rate, always including `t = T`.
pub fn sample_trajectory(
    splines: &PoseSplines,
    profile: &ScalarProfile,
    ctx: &ContactContext,
    rate: f64,
) -> Result<Vec<TrajectorySample>, TrajectoryError> {
    let (a, b) = splines.domain();
    let domain = b - a;
    let s_total = profile.displacement();
    if (s_total - domain).abs() > 1e-9 * domain.max(1.0) {
        return Err(TrajectoryError::DomainMismatch { profile: s_total, domain });
    }
    let duration = profile.duration();
    let steps = (duration * rate).floor() as usize;
    let mut out = Vec::with_capacity(steps + 2);
    for k in 0..=steps {
        let t = k as f64 / rate;
        if t >= duration {
            break;
        }
        out.push(sample_at(splines, profile, ctx, t)?);
    }
    out.push(sample_at(splines, profile, ctx, duration)?);
    Ok(out)
}

/// Path parameters where the sampled path direction turns by more than
/// `threshold` radians between adjacent chords. Runs of flagged samples are
/// merged to the sharpest one.
pub fn detect_cusps(samples: &[(f64, Vector3<f64>)], threshold: f64) -> Vec<f64> {
    let mut cusps = Vec::new();
    let mut best: Option<(f64, f64)> = None; // (angle, sigma) of current run
    for k in 1..samples.len().saturating_sub(1) {
        let v1 = samples[k].1 - samples[k - 1].1;
        let v2 = samples[k + 1].1 - samples[k].1;
        let (n1, n2) = (v1.norm(), v2.norm());
        let angle = if n1 == 0.0 || n2 == 0.0 {
            std::f64::consts::PI
        } else {
            (v1.dot(&v2) / (n1 * n2)).clamp(-1.0, 1.0).acos()
        };
        if angle > threshold {
            best = match best {
                Some((a, s)) if a >= angle => Some((a, s)),
                _ => Some((angle, samples[k].0)),
            };
        } else if let Some((_, s)) = best.take() {
            cusps.push(s);
        }
    }
    if let Some((_, s)) = best {
        cusps.push(s);
    }
    cusps
}

#[cfg(test)]
mod tests;
