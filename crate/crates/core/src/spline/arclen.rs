//! Arc-length map s(u) of a spline curve and its inverse.

use crate::interp::MonotoneCubic;

use super::{BSpline, SplineError};

/// Relative tolerance for the iterative sample doubling.
const LENGTH_TOL: f64 = 1e-9;
const MAX_DOUBLINGS: usize = 12;

/// Monotone map between the curve parameter `u` and cumulative arc length
/// `s`, built from chord sums over a uniform `u` grid that is doubled until
/// the total length settles to `1e-9` relative.
#[derive(Debug, Clone)]
pub struct ArcLengthTable {
    forward: MonotoneCubic,  // u -> s
    inverse: MonotoneCubic,  // s -> u
    length: f64,
    domain: (f64, f64),
}

impl ArcLengthTable {
    pub(super) fn build<const D: usize>(
        curve: &BSpline<D>,
        samples: usize,
    ) -> Result<Self, SplineError> {
        if samples < 2 {
            return Err(SplineError::InvalidCurve("arc length needs >= 2 samples".into()));
        }
        let (a, b) = curve.domain();

        let mut k = samples;
        let mut grid = chord_table(curve, k)?;
        let mut total = *grid.1.last().unwrap();
        for _ in 0..MAX_DOUBLINGS {
            let next_k = 2 * (k - 1) + 1;
            let next = chord_table(curve, next_k)?;
            let next_total = *next.1.last().unwrap();
            let settled = (next_total - total).abs() <= LENGTH_TOL * next_total.max(f64::MIN_POSITIVE);
            k = next_k;
            grid = next;
            total = next_total;
            if settled {
                break;
            }
        }

        let (us, ss) = grid;
        // The inverse needs strictly increasing s; merge stalled stretches
        // (zero-velocity regions of the curve).
        let mut inv_s = Vec::with_capacity(ss.len());
        let mut inv_u = Vec::with_capacity(ss.len());
        for (u, s) in us.iter().zip(&ss) {
            if inv_s.last().map_or(true, |last| *s > *last) {
                inv_s.push(*s);
                inv_u.push(*u);
            }
        }
        if inv_s.len() < 2 {
            return Err(SplineError::DegeneratePolygon);
        }

        Ok(Self {
            forward: MonotoneCubic::new(us, ss),
            inverse: MonotoneCubic::new(inv_s, inv_u),
            length: total,
            domain: (a, b),
        })
    }

    /// Total curve length estimate.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Arc length at parameter `u`.
    pub fn s_at(&self, u: f64) -> f64 {
        self.forward.eval(u.clamp(self.domain.0, self.domain.1)).clamp(0.0, self.length)
    }

    /// Parameter at arc length `s`.
    pub fn u_at(&self, s: f64) -> f64 {
        self.inverse.eval(s.clamp(0.0, self.length)).clamp(self.domain.0, self.domain.1)
    }

    /// Derivative du/ds at arc length `s`.
    pub fn du_ds(&self, s: f64) -> f64 {
        self.inverse.eval_derivative(s.clamp(0.0, self.length))
    }

    /// Derivative ds/du at parameter `u`.
    pub fn ds_du(&self, u: f64) -> f64 {
        self.forward.eval_derivative(u.clamp(self.domain.0, self.domain.1))
    }
}

fn chord_table<const D: usize>(
    curve: &BSpline<D>,
    k: usize,
) -> Result<(Vec<f64>, Vec<f64>), SplineError> {
    let (a, b) = curve.domain();
    let mut us = Vec::with_capacity(k);
    let mut ss = Vec::with_capacity(k);
    let mut prev = curve.evaluate(a)?;
    let mut acc = 0.0;
    us.push(a);
    ss.push(0.0);
    for i in 1..k {
        let u = a + (b - a) * i as f64 / (k - 1) as f64;
        let p = curve.evaluate(u)?;
        acc += (p - prev).norm();
        prev = p;
        us.push(u);
        ss.push(acc);
    }
    Ok((us, ss))
}
