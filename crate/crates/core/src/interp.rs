//! Monotone piecewise-cubic (Fritsch–Carlson) interpolation.

/// Shape-preserving cubic Hermite interpolant over strictly increasing
/// abscissae. Monotone data yields a monotone interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Node derivatives.
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing and `x.len() == y.len() >= 2`.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(x.len() >= 2);
        debug_assert!(x.windows(2).all(|w| w[0] < w[1]));

        let n = x.len();
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        let mut d = vec![0.0; n];
        d[0] = delta[0];
        d[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                // Weighted harmonic mean of neighboring secants.
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // Fritsch-Carlson limiter on the end slopes.
        for (i, end) in [(0usize, 0usize), (n - 2, n - 1)] {
            if delta[i] == 0.0 {
                d[end] = 0.0;
            } else if d[end] * delta[i] < 0.0 {
                d[end] = 0.0;
            } else if d[end].abs() > 3.0 * delta[i].abs() {
                d[end] = 3.0 * delta[i];
            }
        }

        Self { x, y, d }
    }

    fn segment(&self, xq: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&v| v <= xq) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    pub fn eval(&self, xq: f64) -> f64 {
        let i = self.segment(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    pub fn eval_derivative(&self, xq: f64) -> f64 {
        let i = self.segment(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let t2 = t * t;
        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -6.0 * t2 + 6.0 * t;
        let dh11 = 3.0 * t2 - 2.0 * t;
        (dh00 * self.y[i] + dh01 * self.y[i + 1]) / h + dh10 * self.d[i] + dh11 * self.d[i + 1]
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes() {
        let x = vec![0.0, 0.5, 1.2, 2.0];
        let y = vec![1.0, 1.5, 1.6, 3.0];
        let p = MonotoneCubic::new(x.clone(), y.clone());
        for (xi, yi) in x.iter().zip(&y) {
            assert!((p.eval(*xi) - yi).abs() < 1e-14);
        }
    }

    #[test]
    fn monotone_between_nodes() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| v + (2.0 * v).sin() * 0.4).collect();
        let p = MonotoneCubic::new(x, y);
        let mut prev = p.eval(0.0);
        for k in 1..2000 {
            let cur = p.eval(4.9 * k as f64 / 1999.0);
            assert!(cur >= prev - 1e-12);
            prev = cur;
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let x: Vec<f64> = (0..100).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|v| (0.3 * v).exp()).collect();
        let p = MonotoneCubic::new(x, y);
        let h = 1e-6;
        for k in 1..40 {
            let xq = 0.1 + k as f64 * 0.1;
            let fd = (p.eval(xq + h) - p.eval(xq - h)) / (2.0 * h);
            let an = p.eval_derivative(xq);
            assert!((fd - an).abs() < 1e-6, "xq={xq} fd={fd} an={an}");
        }
    }
}
