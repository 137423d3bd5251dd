//! Tridiagonal solvers and natural cubic splines.

use crate::error::{Error, Result};

/// Solve a tridiagonal system in place (Thomas algorithm).
///
/// `lower[i]` multiplies `x[i-1]`, `upper[i]` multiplies `x[i+1]`;
/// `lower[0]` and `upper[n-1]` are ignored. `scratch` must have length `n`.
pub fn thomas(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> Result<()> {
    let n = rhs.len();
    if n == 0 {
        return Ok(());
    }
    let mut beta = diag[0];
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::LinearSolve("zero pivot in tridiagonal solve".into()));
    }
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::LinearSolve(format!("zero pivot at row {i}")));
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

/// Solve a cyclic tridiagonal system (periodic line) by Sherman-Morrison.
///
/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`
/// with indices taken modulo `n`.
pub fn cyclic_thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    if n < 3 {
        return Err(Error::LinearSolve("cyclic system needs n >= 3".into()));
    }
    let alpha = upper[n - 1];
    let beta = lower[0];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    let mut scratch = vec![0.0; n];
    thomas(lower, &d, upper, rhs, &mut scratch)?;
    let mut z = vec![0.0; n];
    z[0] = gamma;
    z[n - 1] = alpha;
    thomas(lower, &d, upper, &mut z, &mut scratch)?;
    let fact = (rhs[0] + beta * rhs[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (r, zi) in rhs.iter_mut().zip(&z) {
        *r -= fact * zi;
    }
    Ok(())
}

/// Cubic spline through `(xs, ys)` with prescribed end second derivatives
/// (zero for the natural spline).
#[derive(Clone, Debug)]
pub struct CubicSpline<'a> {
    xs: &'a [f64],
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl<'a> CubicSpline<'a> {
    pub fn new(xs: &'a [f64], ys: &[f64]) -> Result<Self> {
        Self::with_end_curvature(xs, ys, 0.0, 0.0)
    }

    /// Spline whose second derivative equals `s0` at `xs[0]` and `s1` at the
    /// last node.
    pub fn with_end_curvature(xs: &'a [f64], ys: &[f64], s0: f64, s1: f64) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() || n < 3 {
            return Err(Error::Domain("spline needs >= 3 matching nodes".into()));
        }
        let mut lower = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            lower[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        rhs[0] = s0;
        rhs[n - 1] = s1;
        let mut scratch = vec![0.0; n];
        thomas(&lower, &diag, &upper, &mut rhs, &mut scratch)?;
        Ok(CubicSpline {
            xs,
            ys: ys.to_vec(),
            second: rhs,
        })
    }

    /// Index of the interval containing `x` (clamped to the node range).
    pub fn locate(xs: &[f64], x: f64) -> usize {
        let n = xs.len();
        match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(k) => k.min(n - 2),
            Err(k) => k.saturating_sub(1).min(n - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_in(Self::locate(self.xs, x), x)
    }

    /// Evaluate on interval `k` (`xs[k] <= x <= xs[k+1]`).
    pub fn eval_in(&self, k: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        if x == x0 {
            return self.ys[k];
        }
        if x == x1 {
            return self.ys[k + 1];
        }
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.ys[k]
            + b * self.ys[k + 1]
            + ((a * a * a - a) * self.second[k] + (b * b * b - b) * self.second[k + 1]) * h * h
                / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_laplacian() {
        let n = 9;
        let lower = vec![-1.0; n];
        let diag = vec![2.0; n];
        let upper = vec![-1.0; n];
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                2.0 * x[i] - if i > 0 { x[i - 1] } else { 0.0 } - if i + 1 < n { x[i + 1] } else { 0.0 }
            })
            .collect();
        let mut s = vec![0.0; n];
        thomas(&lower, &diag, &upper, &mut rhs, &mut s).unwrap();
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cyclic_matches_direct_product() {
        let n = 7;
        let lower: Vec<f64> = (0..n).map(|i| -0.3 - 0.01 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.4 + 0.02 * i as f64).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| lower[i] * x[(i + n - 1) % n] + diag[i] * x[i] + upper[i] * x[(i + 1) % n])
            .collect();
        cyclic_thomas(&lower, &diag, &upper, &mut rhs).unwrap();
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spline_hits_nodes_and_interpolates() {
        let xs: Vec<f64> = (0..40).map(|k| (k as f64 / 39.0).powi(2) * 6.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(s.eval(*x), *y);
        }
        let e = (s.eval(0.77) - (-0.77f64 * 0.77).exp()).abs();
        assert!(e < 1e-4, "{e}");
    }
}
