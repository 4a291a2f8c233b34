//! Weighted least-squares B-spline approximation.

use nalgebra::{DMatrix, SVector};

use super::{chord_length_parameters, BSpline, DataPolygon, KnotVector, ParameterTable, SplineError};

/// Fitted curve plus residual diagnostics.
#[derive(Debug, Clone)]
pub struct FitResult<const D: usize> {
    pub curve: BSpline<D>,
    /// Weighted RMS of the point residuals.
    pub residual_rms: f64,
    /// Largest unweighted point residual.
    pub max_error: f64,
}

/// Least-squares fit of a `D`-dimensional spline to `(sigma, value)` samples.
///
/// The knot vector is placed by parameter averaging (clamped ends), and the
/// system is solved through a column-pivoted QR of the weighted collocation
/// matrix rather than the normal equations.
pub fn fit_spline<const D: usize>(
    sigma: &[f64],
    values: &[SVector<f64, D>],
    weights: Option<&[f64]>,
    degree: usize,
    num_ctrl: usize,
) -> Result<FitResult<D>, SplineError> {
    assert_eq!(sigma.len(), values.len());
    let n_pts = sigma.len();
    if n_pts < num_ctrl {
        return Err(SplineError::UnderdeterminedFit { points: n_pts, ctrl: num_ctrl });
    }
    let knots = KnotVector::averaged(sigma, degree, num_ctrl)?;

    let mut a = DMatrix::<f64>::zeros(n_pts, num_ctrl);
    let mut rhs = DMatrix::<f64>::zeros(n_pts, D);
    for (j, (&s, v)) in sigma.iter().zip(values).enumerate() {
        let sw = weights.map_or(1.0, |w| w[j].sqrt());
        let (span, vals) = knots.nonzero_basis(s)?;
        for (r, bv) in vals.iter().enumerate() {
            a[(j, span - degree + r)] = bv * sw;
        }
        for d in 0..D {
            rhs[(j, d)] = v[d] * sw;
        }
    }

    let qr = a.col_piv_qr();
    // Rank check on the R diagonal; a deficient collocation matrix means a
    // knot span without data support (Schoenberg-Whitney violated).
    let r = qr.r();
    let rmax = (0..num_ctrl).map(|i| r[(i, i)].abs()).fold(0.0_f64, f64::max);
    let rmin = (0..num_ctrl).map(|i| r[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(rmax > 0.0) || rmin < 1e-12 * rmax {
        return Err(SplineError::SingularNormalEquations);
    }
    // Least-squares solve by hand; the built-in solver only takes square
    // systems. With A P = Q R: x = P R^-1 (Q^T b)[..n].
    let mut qtb = rhs;
    qr.q_tr_mul(&mut qtb);
    let mut sol = qtb.rows(0, num_ctrl).into_owned();
    if !r.solve_upper_triangular_mut(&mut sol) {
        return Err(SplineError::SingularNormalEquations);
    }
    qr.p().inv_permute_rows(&mut sol);

    let ctrl: Vec<SVector<f64, D>> = (0..num_ctrl)
        .map(|i| SVector::<f64, D>::from_fn(|d, _| sol[(i, d)]))
        .collect();
    let curve = BSpline::new(knots, ctrl)?;

    let mut wssq = 0.0;
    let mut wsum = 0.0;
    let mut max_error: f64 = 0.0;
    for (j, (&s, v)) in sigma.iter().zip(values).enumerate() {
        let w = weights.map_or(1.0, |ws| ws[j]);
        let e = (curve.evaluate(s)? - v).norm();
        wssq += w * e * e;
        wsum += w;
        max_error = max_error.max(e);
    }
    let residual_rms = (wssq / wsum).sqrt();

    Ok(FitResult { curve, residual_rms, max_error })
}

/// Weighted least-squares approximation of a data polygon at the given
/// chord-length parameters.
pub fn fit_least_squares(
    polygon: &DataPolygon,
    params: &ParameterTable,
    degree: usize,
    num_ctrl: usize,
) -> Result<FitResult<3>, SplineError> {
    if params.sigma().len() != polygon.len() {
        return Err(SplineError::InvalidPolygon(
            "parameter table does not match polygon".into(),
        ));
    }
    fit_spline(params.sigma(), polygon.points(), polygon.weights(), degree, num_ctrl)
}

/// Convenience: dedup, parameterize on `[a, b]` and fit in one step.
pub fn fit_polygon(
    polygon: &DataPolygon,
    a: f64,
    b: f64,
    degree: usize,
    num_ctrl: usize,
) -> Result<(FitResult<3>, ParameterTable, DataPolygon), SplineError> {
    let (clean, removed) = polygon.dedup();
    if removed > 0 {
        log::warn!("collapsed {removed} duplicate input points before parameterization");
    }
    if clean.len() < 2 {
        return Err(SplineError::DegeneratePolygon);
    }
    let params = chord_length_parameters(&clean, a, b)?;
    let fit = fit_least_squares(&clean, &params, degree, num_ctrl)?;
    Ok((fit, params, clean))
}
