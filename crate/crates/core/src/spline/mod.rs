//! Clamped B-spline curves: representation, Cox–de Boor evaluation,
//! derivatives, chord-length parameterization, weighted least-squares
//! fitting and arc-length reparameterization.

mod arclen;
mod fit;

pub use arclen::ArcLengthTable;
pub use fit::{fit_least_squares, fit_polygon, fit_spline, FitResult};

use nalgebra::{SVector, Vector3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SplineError {
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("data polygon has zero length")]
    DegeneratePolygon,
    #[error("invalid data polygon: {0}")]
    InvalidPolygon(String),
    #[error("parameter {u} outside the curve domain [{a}, {b}]")]
    OutOfDomain { u: f64, a: f64, b: f64 },
    #[error("derivative order {order} exceeds curve degree {degree}")]
    OrderTooHigh { order: usize, degree: usize },
    #[error("underdetermined fit: {points} data points for {ctrl} control points")]
    UnderdeterminedFit { points: usize, ctrl: usize },
    #[error("singular normal equations: insufficient data coverage per knot span")]
    SingularNormalEquations,
}

/// Clamped, non-decreasing knot vector with degree `p`.
///
/// The first and last `p + 1` knots coincide, so the spline domain is
/// `[a, b]` with `a = u_0` and `b = u_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self, SplineError> {
        let n = knots.len();
        if n < 2 * (degree + 1) {
            return Err(SplineError::InvalidKnots(format!(
                "length {n} < 2(p+1) = {}",
                2 * (degree + 1)
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(SplineError::InvalidKnots("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[0] > w[1]) {
            return Err(SplineError::InvalidKnots("knots must be non-decreasing".into()));
        }
        let a = knots[0];
        let b = knots[n - 1];
        if !(a < b) {
            return Err(SplineError::InvalidKnots("domain is empty (a >= b)".into()));
        }
        if knots[degree] != a || knots[n - 1 - degree] != b {
            return Err(SplineError::InvalidKnots(
                "knot vector is not clamped (p+1-fold end knots required)".into(),
            ));
        }
        Ok(Self { knots, degree })
    }

    /// Clamped knot vector for fitting `m` control points of degree `p` to
    /// parameters `sigma`, with interior knots by averaging windows of `p`
    /// parameter values (de Boor / Piegl–Tiller placement).
    pub fn averaged(sigma: &[f64], degree: usize, m: usize) -> Result<Self, SplineError> {
        let n_pts = sigma.len();
        if m < degree + 1 {
            return Err(SplineError::InvalidKnots(format!(
                "need at least p+1 = {} control points, got {m}",
                degree + 1
            )));
        }
        if n_pts < m {
            return Err(SplineError::UnderdeterminedFit { points: n_pts, ctrl: m });
        }
        let a = sigma[0];
        let b = sigma[n_pts - 1];
        let mut knots = vec![a; degree + 1];
        if n_pts == m {
            // Interpolation: u_{p+j} = mean(sigma_j .. sigma_{j+p-1}).
            for j in 1..m - degree {
                let avg = sigma[j..j + degree].iter().sum::<f64>() / degree as f64;
                knots.push(avg);
            }
        } else {
            // Approximation: spread parameter windows evenly over the data.
            let d = n_pts as f64 / (m - degree) as f64;
            for j in 1..m - degree {
                let pos = j as f64 * d;
                let i = pos.floor() as usize;
                let alpha = pos - i as f64;
                knots.push((1.0 - alpha) * sigma[i - 1] + alpha * sigma[i]);
            }
        }
        knots.extend(std::iter::repeat(b).take(degree + 1));
        Self::new(knots, degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Number of basis functions, m = n - p - 1.
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    fn check_domain(&self, u: f64) -> Result<(), SplineError> {
        let (a, b) = self.domain();
        if u < a || u > b || !u.is_finite() {
            Err(SplineError::OutOfDomain { u, a, b })
        } else {
            Ok(())
        }
    }

    /// Index of the knot span containing `u`, clamped so that the span is
    /// non-degenerate (handles `u == b`).
    pub fn find_span(&self, u: f64) -> usize {
        let p = self.degree;
        let n = self.knots.len();
        let hi = n - p - 2; // last valid span start
        let k = self.knots.partition_point(|&v| v <= u);
        k.saturating_sub(1).clamp(p, hi)
    }

    /// The `p + 1` non-vanishing basis functions at `u`, plus the span index.
    /// Standard triangular scheme from the Cox–de Boor recursion.
    pub fn nonzero_basis(&self, u: f64) -> Result<(usize, Vec<f64>), SplineError> {
        self.check_domain(u)?;
        let p = self.degree;
        let span = self.find_span(u);
        let mut vals = vec![0.0; p + 1];
        vals[0] = 1.0;
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        for j in 1..=p {
            left[j] = u - self.knots[span + 1 - j];
            right[j] = self.knots[span + j] - u;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = vals[r] / (right[r + 1] + left[j - r]);
                vals[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            vals[j] = saved;
        }
        Ok((span, vals))
    }

    /// All `m` basis function values `N_{i,p}(u)`; zero outside the active span.
    pub fn basis_functions(&self, u: f64) -> Result<Vec<f64>, SplineError> {
        let (span, vals) = self.nonzero_basis(u)?;
        let mut out = vec![0.0; self.num_basis()];
        let p = self.degree;
        for (r, v) in vals.into_iter().enumerate() {
            out[span - p + r] = v;
        }
        Ok(out)
    }
}

/// B-spline curve in `D` dimensions over a clamped knot vector.
#[derive(Debug, Clone)]
pub struct BSpline<const D: usize> {
    knots: KnotVector,
    control_points: Vec<SVector<f64, D>>,
}

/// 3D B-spline curve, the representation of processing and robot paths.
pub type BSplineCurve = BSpline<3>;

impl<const D: usize> BSpline<D> {
    pub fn new(knots: KnotVector, control_points: Vec<SVector<f64, D>>) -> Result<Self, SplineError> {
        if control_points.len() != knots.num_basis() {
            return Err(SplineError::InvalidCurve(format!(
                "{} control points, expected m = n - p - 1 = {}",
                control_points.len(),
                knots.num_basis()
            )));
        }
        Ok(Self { knots, control_points })
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.knots.domain()
    }

    pub fn control_points(&self) -> &[SVector<f64, D>] {
        &self.control_points
    }

    /// Total chord length of the control polygon. Used as the length scale
    /// for degeneracy thresholds.
    pub fn control_polygon_length(&self) -> f64 {
        self.control_points
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .sum()
    }

    pub fn evaluate(&self, u: f64) -> Result<SVector<f64, D>, SplineError> {
        let (span, vals) = self.knots.nonzero_basis(u)?;
        let p = self.degree();
        let mut acc = SVector::<f64, D>::zeros();
        for (r, v) in vals.iter().enumerate() {
            acc += self.control_points[span - p + r] * *v;
        }
        Ok(acc)
    }

    /// Exact first-derivative curve (degree `p - 1`).
    pub fn derivative(&self) -> Result<Self, SplineError> {
        let p = self.degree();
        if p == 0 {
            return Err(SplineError::OrderTooHigh { order: 1, degree: 0 });
        }
        let knots = self.knots.knots();
        let m = self.control_points.len();
        let mut ctrl = Vec::with_capacity(m - 1);
        for i in 0..m - 1 {
            let dt = knots[i + p + 1] - knots[i + 1];
            let d = if dt > 0.0 {
                (self.control_points[i + 1] - self.control_points[i]) * (p as f64 / dt)
            } else {
                SVector::<f64, D>::zeros()
            };
            ctrl.push(d);
        }
        let dknots = KnotVector::new(knots[1..knots.len() - 1].to_vec(), p - 1)?;
        Self::new(dknots, ctrl)
    }

    /// Exact derivative curve of the given order.
    pub fn derivative_curve(&self, order: usize) -> Result<Self, SplineError> {
        if order > self.degree() {
            return Err(SplineError::OrderTooHigh { order, degree: self.degree() });
        }
        let mut cur = self.clone();
        for _ in 0..order {
            cur = cur.derivative()?;
        }
        Ok(cur)
    }
}

/// Ordered 3D sample points of a processing path, with optional per-point
/// weights and surface normals.
#[derive(Debug, Clone)]
pub struct DataPolygon {
    points: Vec<Vector3<f64>>,
    weights: Option<Vec<f64>>,
    normals: Option<Vec<Vector3<f64>>>,
}

impl DataPolygon {
    pub fn new(
        points: Vec<Vector3<f64>>,
        weights: Option<Vec<f64>>,
        normals: Option<Vec<Vector3<f64>>>,
    ) -> Result<Self, SplineError> {
        if points.len() < 2 {
            return Err(SplineError::InvalidPolygon("need at least 2 points".into()));
        }
        if let Some(w) = &weights {
            if w.len() != points.len() {
                return Err(SplineError::InvalidPolygon("weight count mismatch".into()));
            }
            if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(SplineError::InvalidPolygon("weights must be positive".into()));
            }
        }
        if let Some(n) = &normals {
            if n.len() != points.len() {
                return Err(SplineError::InvalidPolygon("normal count mismatch".into()));
            }
            if n.iter().any(|v| (v.norm() - 1.0).abs() > 1e-9) {
                return Err(SplineError::InvalidPolygon(
                    "surface normals must have unit length (within 1e-9)".into(),
                ));
            }
        }
        Ok(Self { points, weights, normals })
    }

    pub fn from_points(points: Vec<Vector3<f64>>) -> Result<Self, SplineError> {
        Self::new(points, None, None)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn normals(&self) -> Option<&[Vector3<f64>]> {
        self.normals.as_deref()
    }

    /// Sum of inter-point chord lengths.
    pub fn polygon_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Remove exact consecutive duplicates. Repeated points would produce
    /// repeated chord parameters and a singular fit. Returns the number of
    /// points dropped.
    pub fn dedup(&self) -> (Self, usize) {
        let mut points = Vec::with_capacity(self.points.len());
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        let mut normals = self.normals.as_ref().map(|_| Vec::new());
        for i in 0..self.points.len() {
            if i > 0 && self.points[i] == self.points[i - 1] {
                continue;
            }
            points.push(self.points[i]);
            if let (Some(dst), Some(src)) = (weights.as_mut(), self.weights.as_ref()) {
                dst.push(src[i]);
            }
            if let (Some(dst), Some(src)) = (normals.as_mut(), self.normals.as_ref()) {
                dst.push(src[i]);
            }
        }
        let removed = self.points.len() - points.len();
        (Self { points, weights, normals }, removed)
    }
}

/// Chord-length parameters of a data polygon, mapped onto `[a, b]`.
#[derive(Debug, Clone)]
pub struct ParameterTable {
    sigma: Vec<f64>,
    length: f64,
}

impl ParameterTable {
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Length of the data polygon.
    pub fn length(&self) -> f64 {
        self.length
    }
}

/// Parameters proportional to cumulative chord length:
/// `sigma_k = a + (b - a)/L * sum_{j<k} |r_{j+1} - r_j|`.
pub fn chord_length_parameters(
    polygon: &DataPolygon,
    a: f64,
    b: f64,
) -> Result<ParameterTable, SplineError> {
    if !(a < b) {
        return Err(SplineError::InvalidPolygon("parameter interval requires a < b".into()));
    }
    let length = polygon.polygon_length();
    if length <= 0.0 {
        return Err(SplineError::DegeneratePolygon);
    }
    let pts = polygon.points();
    let mut sigma = Vec::with_capacity(pts.len());
    sigma.push(a);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += (w[1] - w[0]).norm();
        sigma.push(a + (b - a) * acc / length);
    }
    // Clamp the closing parameter against rounding in the cumulative sum.
    *sigma.last_mut().unwrap() = b;
    Ok(ParameterTable { sigma, length })
}

/// Arc-length map of a curve; see [`ArcLengthTable`].
pub fn arc_length_table<const D: usize>(
    curve: &BSpline<D>,
    samples: usize,
) -> Result<ArcLengthTable, SplineError> {
    ArcLengthTable::build(curve, samples)
}
