//! Fixed-TCP path inversion: map processing-path poses on the part to
//! end-effector poses around a spatially fixed tool.
//!
//! Identifying the process orientation frame with the tool frame
//! (`r_PT = r_PF`, `R_PT = R_PF`) gives the end effector relative to the
//! tool, and the known fixed tool pose lifts that into the robot's inertial
//! frame without ever knowing where the part is.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::frame::{ProcessFrameSample, RotationMatrix};

/// Constant part-mount and fixed tool poses.
///
/// For a roller-style tool the tool frame's x axis is the free rolling
/// direction and y the pressing normal, matching the (tangent, normal)
/// columns of the process frame. Other tools pick their own pairing when
/// filling in `tool_rotation`.
#[derive(Debug, Clone)]
pub struct SetupConfig {
    /// End-effector mount position on the part, in the part frame (m).
    pub mount_position: Vector3<f64>,
    /// End-effector mount orientation relative to the part frame.
    pub mount_rotation: RotationMatrix,
    /// Fixed tool position in the inertial frame (m).
    pub tool_position: Vector3<f64>,
    /// Fixed tool orientation in the inertial frame.
    pub tool_rotation: RotationMatrix,
}

impl SetupConfig {
    pub fn identity() -> Self {
        Self {
            mount_position: Vector3::zeros(),
            mount_rotation: RotationMatrix::identity(),
            tool_position: Vector3::zeros(),
            tool_rotation: RotationMatrix::identity(),
        }
    }
}

/// End-effector pose at one path parameter, in the inertial frame.
#[derive(Debug, Clone)]
pub struct RobotPathSample {
    pub sigma: f64,
    pub position: Vector3<f64>,
    pub rotation: RotationMatrix,
}

/// Pose of the end effector relative to the tool frame:
/// `r_TE` expressed in the tool frame, and `R_TE = R_PF^T * R_PE`.
pub fn relative_pose(
    frame: &ProcessFrameSample,
    setup: &SetupConfig,
) -> (Vector3<f64>, RotationMatrix) {
    let r_te_part = setup.mount_position - frame.position;
    let r_tp = frame.rotation.transpose();
    let r_te_tool = r_tp.rotate(&r_te_part);
    let rot_te = r_tp * setup.mount_rotation;
    (r_te_tool, rot_te)
}

/// End-effector pose in the inertial frame:
/// `r_0E = r_0T + R_IT * r_TE`, `R_IE = R_IT * R_TE`.
pub fn robot_pose(frame: &ProcessFrameSample, setup: &SetupConfig) -> RobotPathSample {
    let (r_te_tool, rot_te) = relative_pose(frame, setup);
    RobotPathSample {
        sigma: frame.sigma,
        position: setup.tool_position + setup.tool_rotation.rotate(&r_te_tool),
        rotation: setup.tool_rotation * rot_te,
    }
}

/// Worst-case deviation of the processing point from the fixed tool pose.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FixedTcpReport {
    /// Largest position drift of the contact point from `r_0T` (m).
    pub max_position_drift: f64,
    /// Largest geodesic angle between the carried process frame and `R_IT` (rad).
    pub max_orientation_drift: f64,
    /// Path parameter at which the worst position drift occurred.
    pub worst_sigma: f64,
}

/// Checks the defining fixed-TCP property over sampled pairs of process
/// frames and commanded end-effector poses.
///
/// The part pose is reconstructed from each end-effector pose
/// (`R_IP = R_IE R_PE^T`, `r_0P = r_0E - R_IP r_PE`); the processing-path
/// point carried through it must coincide with the fixed tool pose.
pub fn verify_fixed_tcp(
    samples: &[(ProcessFrameSample, RobotPathSample)],
    setup: &SetupConfig,
) -> FixedTcpReport {
    let mut max_pos: f64 = 0.0;
    let mut max_rot: f64 = 0.0;
    let mut worst_sigma = samples.first().map_or(0.0, |(f, _)| f.sigma);
    for (frame, pose) in samples {
        let r_ip = pose.rotation * setup.mount_rotation.transpose();
        let r_0p = pose.position - r_ip.rotate(&setup.mount_position);
        let contact = r_0p + r_ip.rotate(&frame.position);
        let pos_drift = (contact - setup.tool_position).norm();
        let rot_drift = (r_ip * frame.rotation).angle_to(&setup.tool_rotation);
        if pos_drift > max_pos {
            max_pos = pos_drift;
            worst_sigma = frame.sigma;
        }
        max_rot = max_rot.max(rot_drift);
    }
    FixedTcpReport {
        max_position_drift: max_pos,
        max_orientation_drift: max_rot,
        worst_sigma,
    }
}
