//! Bundled test-part geometries.
//!
//! The planner ships a rounded-corner rectangle (perimeter roughly 0.4 m,
//! lying in the part's x-y plane with the surface normal +z) as a stand-in
//! processing path, plus a sharp-cornered variant for exercising cusp
//! handling.

use nalgebra::Vector3;

use crate::spline::DataPolygon;

/// Rectangle with quarter-circle fillets, sampled uniformly along its
/// perimeter starting at the middle of the bottom edge and running
/// counter-clockwise. All points carry the surface normal (0, 0, 1).
pub fn rounded_rectangle(width: f64, height: f64, fillet: f64, samples: usize) -> DataPolygon {
    assert!(fillet > 0.0 && 2.0 * fillet < width && 2.0 * fillet < height);
    assert!(samples >= 8);

    let hw = width / 2.0;
    let hh = height / 2.0;
    let r = fillet;
    let straight_x = width - 2.0 * r;
    let straight_y = height - 2.0 * r;
    let quarter = std::f64::consts::FRAC_PI_2 * r;
    let perimeter = 2.0 * (straight_x + straight_y) + 4.0 * quarter;

    // Piecewise boundary: half bottom edge, fillet, right edge, fillet, top
    // edge, fillet, left edge, fillet, half bottom edge.
    let point_at = |s: f64| -> Vector3<f64> {
        let mut s = s.rem_euclid(perimeter);
        // bottom edge, right half
        if s < straight_x / 2.0 {
            return Vector3::new(s, -hh, 0.0);
        }
        s -= straight_x / 2.0;
        if s < quarter {
            let th = s / r;
            return Vector3::new(hw - r + r * th.sin(), -hh + r * (1.0 - th.cos()), 0.0);
        }
        s -= quarter;
        if s < straight_y {
            return Vector3::new(hw, -hh + r + s, 0.0);
        }
        s -= straight_y;
        if s < quarter {
            let th = s / r;
            return Vector3::new(hw - r * (1.0 - th.cos()), hh - r + r * th.sin(), 0.0);
        }
        s -= quarter;
        if s < straight_x {
            return Vector3::new(hw - r - s, hh, 0.0);
        }
        s -= straight_x;
        if s < quarter {
            let th = s / r;
            return Vector3::new(-hw + r - r * th.sin(), hh - r + r * th.cos(), 0.0);
        }
        s -= quarter;
        if s < straight_y {
            return Vector3::new(-hw, hh - r - s, 0.0);
        }
        s -= straight_y;
        if s < quarter {
            let th = s / r;
            return Vector3::new(-hw + r * (1.0 - th.cos()), -hh + r * (1.0 - th.sin()), 0.0);
        }
        s -= quarter;
        Vector3::new(-hw + r + s, -hh, 0.0)
    };

    // Open path: stop one sample step short of closing the loop, so the
    // first and last points stay distinct.
    let points: Vec<Vector3<f64>> = (0..samples)
        .map(|k| point_at(perimeter * k as f64 / samples as f64))
        .collect();
    let normals = vec![Vector3::z(); points.len()];
    DataPolygon::new(points, None, Some(normals)).expect("generated part is valid")
}

/// Sharp-cornered rectangle boundary, same sampling scheme. The corners map
/// to cusps on the robot path.
pub fn sharp_rectangle(width: f64, height: f64, samples: usize) -> DataPolygon {
    assert!(samples >= 8);
    let hw = width / 2.0;
    let hh = height / 2.0;
    let perimeter = 2.0 * (width + height);
    let point_at = |s: f64| -> Vector3<f64> {
        let mut s = s.rem_euclid(perimeter);
        if s < width / 2.0 {
            return Vector3::new(s, -hh, 0.0);
        }
        s -= width / 2.0;
        if s < height {
            return Vector3::new(hw, -hh + s, 0.0);
        }
        s -= height;
        if s < width {
            return Vector3::new(hw - s, hh, 0.0);
        }
        s -= width;
        if s < height {
            return Vector3::new(-hw, hh - s, 0.0);
        }
        s -= height;
        Vector3::new(-hw + s, -hh, 0.0)
    };
    let points: Vec<Vector3<f64>> = (0..samples)
        .map(|k| point_at(perimeter * k as f64 / samples as f64))
        .collect();
    let normals = vec![Vector3::z(); points.len()];
    DataPolygon::new(points, None, Some(normals)).expect("generated part is valid")
}

/// Default bundled part: 0.13 m x 0.09 m with 0.02 m fillets
/// (perimeter ~ 0.4 m).
pub fn default_test_part(samples: usize) -> DataPolygon {
    rounded_rectangle(0.13, 0.09, 0.02, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounded_rectangle_perimeter() {
        let poly = default_test_part(4000);
        let closed = 2.0 * (0.13 - 0.04 + 0.09 - 0.04) + 2.0 * std::f64::consts::PI * 0.02;
        let expect = closed * 3999.0 / 4000.0;
        assert!((poly.polygon_length() - expect).abs() < 1e-5);
    }

    #[test]
    fn rounded_rectangle_is_continuous() {
        let poly = default_test_part(4000);
        let step = poly.polygon_length() / 3999.0;
        for w in poly.points().windows(2) {
            assert!((w[1] - w[0]).norm() < 2.0 * step, "jump between samples");
        }
    }

    #[test]
    fn sharp_rectangle_perimeter() {
        let poly = sharp_rectangle(0.12, 0.08, 2000);
        assert!((poly.polygon_length() - 0.4 * 1999.0 / 2000.0).abs() < 1e-4);
    }
}
