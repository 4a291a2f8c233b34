//! Planner configuration, JSON-schema validated (unknown keys rejected).

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::frame::{FrameError, RotationMatrix};
use crate::profile::MotionLimits;
use crate::transform::SetupConfig;

/// Which path the parameter is arc-length parameterized along, i.e. where
/// the velocity/acceleration/jerk limits apply: at the TCP (processing
/// speed) or at the end effector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpeedFrame {
    #[default]
    Tcp,
    EndEffector,
}

/// Surface-normal source: one constant vector for the whole path, or the
/// per-point normals carried by the input (interpolated linearly between
/// samples, then renormalized).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormalConfig {
    Constant { vector: [f64; 3] },
    PerPoint,
}

impl Default for NormalConfig {
    fn default() -> Self {
        NormalConfig::Constant { vector: [0.0, 0.0, 1.0] }
    }
}

/// Mount and tool poses as plain arrays (rotations row-major 3x3).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseConfig {
    pub mount_position: [f64; 3],
    #[serde(default = "identity3")]
    pub mount_rotation: [[f64; 3]; 3],
    pub tool_position: [f64; 3],
    #[serde(default = "identity3")]
    pub tool_rotation: [[f64; 3]; 3],
}

fn identity3() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn to_matrix(m: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| m[r][c])
}

impl PoseConfig {
    pub fn to_setup(&self) -> Result<SetupConfig, FrameError> {
        Ok(SetupConfig {
            mount_position: Vector3::from_column_slice(&self.mount_position),
            mount_rotation: RotationMatrix::new(to_matrix(&self.mount_rotation))?,
            tool_position: Vector3::from_column_slice(&self.tool_position),
            tool_rotation: RotationMatrix::new(to_matrix(&self.tool_rotation))?,
        })
    }
}

/// Pass/fail thresholds of the validation report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Fixed-TCP position drift (m).
    pub fixed_tcp_position: f64,
    /// Fixed-TCP orientation drift (rad).
    pub fixed_tcp_orientation: f64,
    /// Pose-spline position fit deviation (m).
    pub fit_position: f64,
    /// Pose-spline angle fit deviation (rad).
    pub fit_orientation: f64,
    /// TCP speed error during cruise (m/s).
    pub tcp_speed: f64,
    /// Numerical slack on the profile limit checks.
    pub limit_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fixed_tcp_position: 1e-9,
            fixed_tcp_orientation: 1e-9,
            fit_position: 1e-4,
            fit_orientation: 1e-3,
            tcp_speed: 1e-6,
            limit_slack: 1e-9,
        }
    }
}

/// Full planner configuration. See the README for the JSON layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerConfig {
    /// B-spline degree for all fits; at least 5 keeps the jerk smooth.
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Control points for the processing-path fit. No principled default
    /// exists; m around N/4 tends to work for dense inputs.
    pub num_ctrl: usize,
    /// Path samples, uniform in arc length.
    #[serde(default = "default_num_samples")]
    pub num_samples: usize,
    /// Initial sample count of the arc-length tables (doubled internally
    /// until converged).
    #[serde(default = "default_arc_samples")]
    pub arc_samples: usize,
    #[serde(default)]
    pub speed_frame: SpeedFrame,
    pub limits: MotionLimits,
    pub setup: PoseConfig,
    #[serde(default)]
    pub normal: NormalConfig,
    /// Re-fit the robot path with fewer control points to smooth cusps.
    /// Off means an interpolatory re-fit (the pose splines reproduce every
    /// sample).
    #[serde(default)]
    pub smoothing: bool,
    /// Pose-spline control points when `smoothing` is on.
    #[serde(default = "default_smoothing_ctrl")]
    pub smoothing_ctrl: usize,
    /// Trajectory output rate (Hz).
    #[serde(default = "default_output_rate")]
    pub output_rate: f64,
    /// Direction change between adjacent samples flagged as a cusp (deg).
    #[serde(default = "default_cusp_threshold")]
    pub cusp_threshold_deg: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_degree() -> usize {
    5
}
fn default_num_samples() -> usize {
    1000
}
fn default_arc_samples() -> usize {
    1024
}
fn default_smoothing_ctrl() -> usize {
    120
}
fn default_output_rate() -> f64 {
    1000.0
}
fn default_cusp_threshold() -> f64 {
    5.0
}

impl PlannerConfig {
    /// Sensible defaults around the bundled test part: roller-style setup
    /// with the end effector gripping the part from above its center, tool
    /// half a meter in front of the robot base.
    pub fn example() -> Self {
        Self {
            degree: 5,
            num_ctrl: 80,
            num_samples: 1000,
            arc_samples: 1024,
            speed_frame: SpeedFrame::Tcp,
            limits: MotionLimits { v_max: 0.05, a_max: 0.5, j_max: 5.0 },
            setup: PoseConfig {
                mount_position: [0.0, 0.0, 0.1],
                mount_rotation: identity3(),
                tool_position: [0.5, 0.0, 0.3],
                tool_rotation: identity3(),
            },
            normal: NormalConfig::default(),
            smoothing: false,
            smoothing_ctrl: 120,
            output_rate: 1000.0,
            cusp_threshold_deg: 5.0,
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.degree < 1 {
            return Err("degree must be at least 1".into());
        }
        if self.num_ctrl < self.degree + 1 {
            return Err(format!("num_ctrl must be at least degree+1 = {}", self.degree + 1));
        }
        if self.num_samples < self.degree + 1 {
            return Err("num_samples too small".into());
        }
        if self.arc_samples < 2 {
            return Err("arc_samples must be at least 2".into());
        }
        if self.smoothing && self.smoothing_ctrl < self.degree + 1 {
            return Err("smoothing_ctrl must be at least degree+1".into());
        }
        if !(self.output_rate > 0.0) {
            return Err("output_rate must be positive".into());
        }
        if !(self.cusp_threshold_deg > 0.0) {
            return Err("cusp_threshold_deg must be positive".into());
        }
        self.limits.validate().map_err(|e| e.to_string())?;
        if let NormalConfig::Constant { vector } = &self.normal {
            if Vector3::from_column_slice(vector).norm() == 0.0 {
                return Err("constant normal vector must be non-zero".into());
            }
        }
        self.setup.to_setup().map_err(|e| e.to_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_config_round_trips_and_validates() {
        let cfg = PlannerConfig::example();
        cfg.validate().unwrap();
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back: PlannerConfig = serde_json::from_str(&json).unwrap();
        back.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v: serde_json::Value =
            serde_json::to_value(PlannerConfig::example()).unwrap();
        v.as_object_mut().unwrap().insert("surprise".into(), 1.into());
        assert!(serde_json::from_value::<PlannerConfig>(v).is_err());
    }

    #[test]
    fn invalid_rotation_in_setup_rejected() {
        let mut cfg = PlannerConfig::example();
        cfg.setup.tool_rotation[0][0] = 2.0;
        assert!(cfg.validate().is_err());
    }
}
