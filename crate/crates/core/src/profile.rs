//! Jerk-limited rest-to-rest time law for the path parameter.
//!
//! The jerk is built from sin²-shaped pulses, so jerk itself is continuous
//! and starts/ends every pulse at zero; the path parameter is C³. Up to
//! seven phases are used:
//!
//! 1. jerk-up pulse      (acceleration 0 -> A)
//! 2. constant accel A
//! 3. jerk-down pulse    (A -> 0), peak velocity reached
//! 4. cruise
//! 5. jerk-down pulse    (0 -> -A)
//! 6. constant decel -A
//! 7. jerk-up pulse      (-A -> 0)
//!
//! A sin² pulse of amplitude `J` and duration `Tj` changes the acceleration
//! by `J*Tj/2`; pulses always run at `J = j_max`, so shorter pulses are used
//! when the full acceleration cannot be reached. Degenerate displacements
//! drop the cruise and/or constant-acceleration phases with closed-form peak
//! solves and a bisection fallback.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("displacement must be positive, got {0}")]
    NonpositiveDisplacement(f64),
    #[error("time {t} outside the profile range [0, {duration}]")]
    OutOfTimeRange { t: f64, duration: f64 },
    #[error("invalid motion limits: all of v_max, a_max, j_max must be positive and finite")]
    InvalidLimits,
}

/// Maximum velocity, acceleration and jerk of the path parameter. With an
/// arc-length parameterized path these are Cartesian limits too.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MotionLimits {
    pub v_max: f64,
    pub a_max: f64,
    pub j_max: f64,
}

impl MotionLimits {
    pub fn validate(&self) -> Result<(), ProfileError> {
        let ok = [self.v_max, self.a_max, self.j_max]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(ProfileError::InvalidLimits)
        }
    }
}

/// State of the path parameter at a segment boundary.
#[derive(Debug, Clone, Copy)]
struct BoundaryState {
    position: f64,
    velocity: f64,
    acceleration: f64,
}

#[derive(Debug, Clone, Copy)]
enum SegmentShape {
    /// sin² jerk pulse with signed peak amplitude.
    JerkPulse { amplitude: f64 },
    /// Zero jerk (constant acceleration, covers cruise with a = 0).
    Constant,
}

#[derive(Debug, Clone)]
struct Segment {
    shape: SegmentShape,
    duration: f64,
    start: BoundaryState,
}

impl Segment {
    /// Closed-form state `tau` seconds into the segment.
    fn eval(&self, tau: f64) -> (f64, f64, f64, f64) {
        let BoundaryState { position: s0, velocity: v0, acceleration: a0 } = self.start;
        match self.shape {
            SegmentShape::Constant => (
                s0 + v0 * tau + 0.5 * a0 * tau * tau,
                v0 + a0 * tau,
                a0,
                0.0,
            ),
            SegmentShape::JerkPulse { amplitude: j } => {
                let t_j = self.duration;
                let w = std::f64::consts::PI / t_j;
                let c = t_j * t_j / (8.0 * std::f64::consts::PI * std::f64::consts::PI);
                let sin2 = (w * tau).sin();
                let jerk = j * sin2 * sin2;
                let acc = a0 + j * (0.5 * tau - t_j / (4.0 * std::f64::consts::PI) * (2.0 * w * tau).sin());
                let vel = v0 + a0 * tau + j * (0.25 * tau * tau + c * ((2.0 * w * tau).cos() - 1.0));
                let pos = s0
                    + v0 * tau
                    + 0.5 * a0 * tau * tau
                    + j * (tau * tau * tau / 12.0 + c * (t_j / (2.0 * std::f64::consts::PI) * (2.0 * w * tau).sin() - tau));
                (pos, vel, acc, jerk)
            }
        }
    }

    fn end_state(&self) -> BoundaryState {
        let (position, velocity, acceleration, _) = self.eval(self.duration);
        BoundaryState { position, velocity, acceleration }
    }
}

/// Sampled state of the scalar time law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
    pub jerk: f64,
}

/// Piecewise sin²-jerk rest-to-rest profile covering a displacement `S`.
#[derive(Debug, Clone)]
pub struct ScalarProfile {
    segments: Vec<Segment>,
    /// Segment start times, same length as `segments`.
    starts: Vec<f64>,
    duration: f64,
    displacement: f64,
    peak_velocity: f64,
    peak_acceleration: f64,
    jerk_amplitude: f64,
    cruise: Option<(f64, f64)>,
    limits: MotionLimits,
}

/// Shape parameters of one symmetric accel (or decel) phase.
#[derive(Debug, Clone, Copy)]
struct AccelPhase {
    /// Duration of each sin² pulse.
    t_j: f64,
    /// Duration of the constant-acceleration stretch.
    t_a: f64,
    /// Peak acceleration.
    a_peak: f64,
}

impl AccelPhase {
    /// Phase bringing the velocity from rest to `v_peak` under `limits`.
    fn for_velocity(v_peak: f64, limits: &MotionLimits) -> Self {
        let j = limits.j_max;
        // A pulse pair with no constant stretch yields dv = 2 A^2 / j.
        let a_peak = limits.a_max.min((0.5 * v_peak * j).sqrt());
        let t_j = 2.0 * a_peak / j;
        let t_a = (v_peak / a_peak - t_j).max(0.0);
        Self { t_j, t_a, a_peak }
    }

    fn total(&self) -> f64 {
        2.0 * self.t_j + self.t_a
    }
}

/// Distance covered by accel + decel phases for a given peak velocity
/// (the velocity profile is symmetric within each phase).
fn stop_to_stop_distance(v_peak: f64, limits: &MotionLimits) -> f64 {
    v_peak * AccelPhase::for_velocity(v_peak, limits).total()
}

/// Plans a rest-to-rest profile over displacement `s_total`.
pub fn plan_profile(s_total: f64, limits: MotionLimits) -> Result<ScalarProfile, ProfileError> {
    limits.validate()?;
    if !(s_total > 0.0) || !s_total.is_finite() {
        return Err(ProfileError::NonpositiveDisplacement(s_total));
    }

    let j = limits.j_max;
    let full = AccelPhase::for_velocity(limits.v_max, &limits);
    let (v_peak, t_cruise) = if s_total >= limits.v_max * full.total() {
        (limits.v_max, s_total / limits.v_max - full.total())
    } else {
        // No cruise. First try reaching a_max with a constant-accel stretch:
        // S = v_p * (Tj + v_p / A) with Tj = 2 a_max / j. Citardauq form for
        // stability at tiny displacements.
        let a = limits.a_max;
        let t_j = 2.0 * a / j;
        let mut v_p = 2.0 * s_total / (t_j + (t_j * t_j + 4.0 * s_total / a).sqrt());
        if v_p < a * t_j {
            // a_max unreachable: pulse-only phases, S = 8 A^3 / j^2.
            let a_red = (s_total * j * j / 8.0).cbrt().min(a);
            v_p = 2.0 * a_red * a_red / j;
        }
        v_p = v_p.min(limits.v_max);
        // Closed forms are exact up to rounding; fall back to bisection on
        // the peak velocity if they disagree with the target displacement.
        if (stop_to_stop_distance(v_p, &limits) - s_total).abs() > 1e-12 * s_total {
            let (mut lo, mut hi) = (0.0, limits.v_max);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if stop_to_stop_distance(mid, &limits) < s_total {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * limits.v_max {
                    break;
                }
            }
            v_p = 0.5 * (lo + hi);
        }
        (v_p, 0.0)
    };

    let phase = AccelPhase::for_velocity(v_peak, &limits);
    let AccelPhase { t_j, t_a, a_peak } = phase;

    // Assemble segments, chaining positions numerically but pinning the
    // velocity/acceleration boundary values to their analytic values so
    // rounding cannot accumulate into the rest conditions.
    let half_dv = 0.5 * a_peak * t_j; // velocity gained by one pulse
    let plan: [(SegmentShape, f64, f64, f64); 7] = [
        (SegmentShape::JerkPulse { amplitude: j }, t_j, 0.0, 0.0),
        (SegmentShape::Constant, t_a, half_dv, a_peak),
        (SegmentShape::JerkPulse { amplitude: -j }, t_j, half_dv + a_peak * t_a, a_peak),
        (SegmentShape::Constant, t_cruise, v_peak, 0.0),
        (SegmentShape::JerkPulse { amplitude: -j }, t_j, v_peak, 0.0),
        (SegmentShape::Constant, t_a, v_peak - half_dv, -a_peak),
        (SegmentShape::JerkPulse { amplitude: j }, t_j, half_dv, -a_peak),
    ];

    let mut segments = Vec::new();
    let mut starts = Vec::new();
    let mut t0 = 0.0;
    let mut position = 0.0;
    let mut cruise = None;
    for (shape, duration, velocity, acceleration) in plan {
        if duration <= 0.0 {
            continue;
        }
        let seg = Segment {
            shape,
            duration,
            start: BoundaryState { position, velocity, acceleration },
        };
        if matches!(shape, SegmentShape::Constant) && acceleration == 0.0 {
            cruise = Some((t0, t0 + duration));
        }
        position = seg.end_state().position;
        starts.push(t0);
        t0 += duration;
        segments.push(seg);
    }

    Ok(ScalarProfile {
        segments,
        starts,
        duration: t0,
        displacement: position,
        peak_velocity: v_peak,
        peak_acceleration: a_peak,
        jerk_amplitude: j,
        cruise,
        limits,
    })
}

impl ScalarProfile {
    /// Total duration T.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Total displacement sigma(T).
    pub fn displacement(&self) -> f64 {
        self.displacement
    }

    pub fn peak_velocity(&self) -> f64 {
        self.peak_velocity
    }

    pub fn peak_acceleration(&self) -> f64 {
        self.peak_acceleration
    }

    pub fn jerk_amplitude(&self) -> f64 {
        self.jerk_amplitude
    }

    pub fn limits(&self) -> &MotionLimits {
        &self.limits
    }

    /// Time window of the constant-velocity phase, if one exists.
    pub fn cruise_window(&self) -> Option<(f64, f64)> {
        self.cruise
    }

    /// Whether the profile contains a constant-velocity phase at `v_max`.
    pub fn has_cruise(&self) -> bool {
        self.cruise.is_some()
    }

    /// Closed-form `(sigma, sigma', sigma'', sigma''')` at time `t`.
    pub fn eval(&self, t: f64) -> Result<ProfileSample, ProfileError> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(ProfileError::OutOfTimeRange { t, duration: self.duration });
        }
        // Exact rest boundaries.
        if t == 0.0 {
            return Ok(ProfileSample { position: 0.0, velocity: 0.0, acceleration: 0.0, jerk: 0.0 });
        }
        if t == self.duration {
            return Ok(ProfileSample {
                position: self.displacement,
                velocity: 0.0,
                acceleration: 0.0,
                jerk: 0.0,
            });
        }
        let idx = match self.starts.partition_point(|&s| s <= t) {
            0 => 0,
            k => k - 1,
        };
        let (position, velocity, acceleration, jerk) = self.segments[idx].eval(t - self.starts[idx]);
        Ok(ProfileSample { position, velocity, acceleration, jerk })
    }
}
