//! Planning library for robot trajectories with a spatially fixed tool
//! center point (TCP).
//!
//! The part is carried by the robot while the tool stays put, so a
//! processing path defined on the part has to be inverted into an
//! end-effector path around the fixed tool pose. The pipeline is:
//!
//! 1. [`spline`] — fit the processing path as a clamped B-spline and
//!    reparameterize it by arc length,
//! 2. [`frame`] — build process orientation frames (tangent, prescribed
//!    surface normal, binormal) along the path,
//! 3. [`transform`] — invert each frame pose around the fixed tool pose to
//!    get the end-effector path,
//! 4. [`profile`] — plan a jerk-limited sin²-pulse time law for the path
//!    parameter,
//! 5. [`trajectory`] — combine path splines and time law into time-stamped
//!    pose/velocity/acceleration samples and validate the result.

pub mod frame;
pub(crate) mod interp;
pub mod io;
pub mod parts;
pub mod profile;
pub mod spline;
pub mod trajectory;
pub mod transform;

pub use frame::{ProcessFrameSample, RotationMatrix, TaitBryanAngles};
pub use profile::{MotionLimits, ProfileSample, ScalarProfile};
pub use spline::{BSpline, BSplineCurve, DataPolygon, KnotVector, ParameterTable};
pub use trajectory::{PlannerConfig, PoseSplines, TrajectorySample, ValidationReport};
pub use transform::{RobotPathSample, SetupConfig};
