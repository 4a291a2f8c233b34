//! File formats of the planner: CSV for point-wise data (paths, frames,
//! trajectories), JSON for structured data (configs, curves, reports).
//!
//! All CSV files carry a mandatory header row and use `\n` line endings;
//! floats are written in Rust's shortest round-trip form, so identical
//! inputs produce byte-identical outputs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::{SVector, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{rotation_to_taitbryan, ProcessFrameSample};
use crate::spline::{BSplineCurve, DataPolygon, KnotVector, SplineError};
use crate::trajectory::{unwrap_angle_sequence, PlannerConfig, TrajectorySample, ValidationReport};
use crate::transform::RobotPathSample;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("format error: {0}")]
    Format(String),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

fn parse_f64(field: &str, name: &str, line: usize) -> Result<f64, IoError> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| bad(format!("record {line}: column '{name}' is not a number: {field:?}")))
}

// ---------------------------------------------------------------------------
// Data polygon input
// ---------------------------------------------------------------------------

/// JSON form of a processing path.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonJson {
    points: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normals: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

/// Reads a processing path from CSV or JSON, dispatched on the extension.
///
/// CSV columns: `x,y,z` with optional `nx,ny,nz` (unit surface normals) and
/// optional `w` (positive fit weights), in any order, named in the header.
pub fn read_polygon(path: &Path) -> Result<DataPolygon, IoError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_polygon_json(path),
        Some("csv") => read_polygon_csv(path),
        other => Err(bad(format!(
            "unsupported input extension {other:?} (expected .csv or .json)"
        ))),
    }
}

pub fn read_polygon_json(path: &Path) -> Result<DataPolygon, IoError> {
    let raw: PolygonJson = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    let points = raw.points.iter().map(|p| Vector3::from_column_slice(p)).collect();
    let normals = raw
        .normals
        .map(|ns| ns.iter().map(|n| Vector3::from_column_slice(n)).collect());
    Ok(DataPolygon::new(points, raw.weights, normals)?)
}

pub fn read_polygon_csv(path: &Path) -> Result<DataPolygon, IoError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers: Vec<String> =
        reader.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (ix, iy, iz) = match (col("x"), col("y"), col("z")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(bad("CSV header must contain columns x, y, z")),
    };
    let normal_cols = match (col("nx"), col("ny"), col("nz")) {
        (Some(a), Some(b), Some(c)) => Some((a, b, c)),
        (None, None, None) => None,
        _ => return Err(bad("normal columns nx, ny, nz must appear together")),
    };
    let weight_col = col("w");

    let mut points = Vec::new();
    let mut normals = normal_cols.map(|_| Vec::new());
    let mut weights = weight_col.map(|_| Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let get = |i: usize, name: &str| -> Result<f64, IoError> {
            let field = record
                .get(i)
                .ok_or_else(|| bad(format!("record {line}: missing column '{name}'")))?;
            parse_f64(field, name, line)
        };
        points.push(Vector3::new(get(ix, "x")?, get(iy, "y")?, get(iz, "z")?));
        if let (Some(ns), Some((a, b, c))) = (normals.as_mut(), normal_cols) {
            ns.push(Vector3::new(get(a, "nx")?, get(b, "ny")?, get(c, "nz")?));
        }
        if let (Some(ws), Some(i)) = (weights.as_mut(), weight_col) {
            ws.push(get(i, "w")?);
        }
    }
    Ok(DataPolygon::new(points, weights, normals)?)
}

/// Writes a processing path as CSV (`x,y,z[,nx,ny,nz][,w]`).
pub fn write_polygon_csv(path: &Path, polygon: &DataPolygon) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut header = vec!["x", "y", "z"];
    if polygon.normals().is_some() {
        header.extend(["nx", "ny", "nz"]);
    }
    if polygon.weights().is_some() {
        header.push("w");
    }
    writeln!(out, "{}", header.join(","))?;
    for (k, p) in polygon.points().iter().enumerate() {
        let mut fields = vec![p.x.to_string(), p.y.to_string(), p.z.to_string()];
        if let Some(ns) = polygon.normals() {
            fields.extend([ns[k].x.to_string(), ns[k].y.to_string(), ns[k].z.to_string()]);
        }
        if let Some(ws) = polygon.weights() {
            fields.push(ws[k].to_string());
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(out.flush()?)
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

/// JSON form of a 3D B-spline curve.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    degree: usize,
    knots: Vec<f64>,
    control_points: Vec<[f64; 3]>,
}

pub fn write_curve_json(path: &Path, curve: &BSplineCurve) -> Result<(), IoError> {
    let raw = CurveJson {
        degree: curve.degree(),
        knots: curve.knot_vector().knots().to_vec(),
        control_points: curve.control_points().iter().map(|p| [p.x, p.y, p.z]).collect(),
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &raw)?;
    writeln!(out)?;
    Ok(out.flush()?)
}

pub fn read_curve_json(path: &Path) -> Result<BSplineCurve, IoError> {
    let raw: CurveJson = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    let knots = KnotVector::new(raw.knots, raw.degree)?;
    let ctrl = raw.control_points.iter().map(|p| Vector3::from_column_slice(p)).collect();
    Ok(BSplineCurve::new(knots, ctrl)?)
}

// ---------------------------------------------------------------------------
// Frames and robot paths
// ---------------------------------------------------------------------------

pub fn write_frames_csv(path: &Path, frames: &[ProcessFrameSample]) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "sigma,x,y,z,tx,ty,tz,nx,ny,nz,bx,by,bz")?;
    for f in frames {
        let v = [
            f.sigma, f.position.x, f.position.y, f.position.z, //
            f.tangent.x, f.tangent.y, f.tangent.z, //
            f.normal.x, f.normal.y, f.normal.z, //
            f.binormal.x, f.binormal.y, f.binormal.z,
        ];
        writeln!(out, "{}", v.map(|x| x.to_string()).join(","))?;
    }
    Ok(out.flush()?)
}

/// Writes end-effector poses as `sigma,x,y,z,alpha,beta,gamma`; the angle
/// columns are unwrapped so they are spline-ready.
pub fn write_robot_path_csv(path: &Path, samples: &[RobotPathSample]) -> Result<(), IoError> {
    let mut alpha = Vec::with_capacity(samples.len());
    let mut beta = Vec::with_capacity(samples.len());
    let mut gamma = Vec::with_capacity(samples.len());
    for s in samples {
        let a = rotation_to_taitbryan(&s.rotation).map_err(|e| bad(e.to_string()))?;
        alpha.push(a.alpha);
        beta.push(a.beta);
        gamma.push(a.gamma);
    }
    unwrap_angle_sequence(&mut alpha);
    unwrap_angle_sequence(&mut beta);
    unwrap_angle_sequence(&mut gamma);

    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "sigma,x,y,z,alpha,beta,gamma")?;
    for (k, s) in samples.iter().enumerate() {
        let v = [s.sigma, s.position.x, s.position.y, s.position.z, alpha[k], beta[k], gamma[k]];
        writeln!(out, "{}", v.map(|x| x.to_string()).join(","))?;
    }
    Ok(out.flush()?)
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

const TRAJECTORY_HEADER: &str = "t,x,y,z,alpha,beta,gamma,\
vx,vy,vz,valpha,vbeta,vgamma,\
ax,ay,az,aalpha,abeta,agamma,\
wx,wy,wz,dwx,dwy,dwz,\
vtcpx,vtcpy,vtcpz";

/// Writes time-stamped trajectory samples: pose, pose derivatives, angular
/// velocity/acceleration and the TCP contact velocity.
pub fn write_trajectory_csv(path: &Path, samples: &[TrajectorySample]) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for s in samples {
        let mut fields = Vec::with_capacity(28);
        fields.push(s.t.to_string());
        for i in 0..6 {
            fields.push(s.pose[i].to_string());
        }
        for i in 0..6 {
            fields.push(s.velocity[i].to_string());
        }
        for i in 0..6 {
            fields.push(s.acceleration[i].to_string());
        }
        for i in 0..3 {
            fields.push(s.angular_velocity[i].to_string());
        }
        for i in 0..3 {
            fields.push(s.angular_acceleration[i].to_string());
        }
        for i in 0..3 {
            fields.push(s.tcp_velocity[i].to_string());
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(out.flush()?)
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectorySample>, IoError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let expected: Vec<&str> = TRAJECTORY_HEADER.split(',').collect();
    let headers: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    if headers != expected {
        return Err(bad("trajectory CSV header does not match the planner format"));
    }
    let mut samples = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != expected.len() {
            return Err(bad(format!(
                "record {line}: expected {} fields, got {}",
                expected.len(),
                record.len()
            )));
        }
        let mut vals = [0.0; 28];
        for (i, field) in record.iter().enumerate() {
            vals[i] = parse_f64(field, expected[i], line)?;
        }
        samples.push(TrajectorySample {
            t: vals[0],
            pose: SVector::<f64, 6>::from_column_slice(&vals[1..7]),
            velocity: SVector::<f64, 6>::from_column_slice(&vals[7..13]),
            acceleration: SVector::<f64, 6>::from_column_slice(&vals[13..19]),
            angular_velocity: Vector3::from_column_slice(&vals[19..22]),
            angular_acceleration: Vector3::from_column_slice(&vals[22..25]),
            tcp_velocity: Vector3::from_column_slice(&vals[25..28]),
        });
    }
    Ok(samples)
}

/// Writes the scalar time law sampled at `rate` Hz:
/// `t,sigma,dsigma,ddsigma,dddsigma`.
pub fn write_profile_csv(
    path: &Path,
    profile: &crate::profile::ScalarProfile,
    rate: f64,
) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "t,sigma,dsigma,ddsigma,dddsigma")?;
    let steps = (profile.duration() * rate).floor() as usize;
    let mut write_row = |t: f64| -> Result<(), IoError> {
        let s = profile.eval(t).map_err(|e| bad(e.to_string()))?;
        let v = [t, s.position, s.velocity, s.acceleration, s.jerk];
        writeln!(out, "{}", v.map(|x| x.to_string()).join(","))?;
        Ok(())
    };
    for k in 0..=steps {
        let t = k as f64 / rate;
        if t >= profile.duration() {
            break;
        }
        write_row(t)?;
    }
    write_row(profile.duration())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Configs and reports
// ---------------------------------------------------------------------------

pub fn read_config(path: &Path) -> Result<PlannerConfig, IoError> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn write_config_json(path: &Path, config: &PlannerConfig) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, config)?;
    writeln!(out)?;
    Ok(out.flush()?)
}

pub fn write_report_json(path: &Path, report: &ValidationReport) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(out.flush()?)
}

pub fn read_report_json(path: &Path) -> Result<ValidationReport, IoError> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
