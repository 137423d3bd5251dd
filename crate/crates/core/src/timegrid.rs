//! Linear interpolation on a list of stored time levels.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Bracketing level `k` and weight `theta` with `t = (1 - theta) t_k + theta t_{k+1}`.
///
/// Times at a stored level return `theta = 0` exactly.
pub fn locate(times: &[f64], t: f64) -> Result<(usize, f64)> {
    let n = times.len();
    if n == 0 {
        return Err(Error::TimeGrid("empty time grid".into()));
    }
    let tol = 1e-12 * times[n - 1].abs().max(1.0);
    if t < times[0] - tol || t > times[n - 1] + tol {
        return Err(Error::TimeGrid(format!(
            "t = {t} outside stored range [{}, {}]",
            times[0],
            times[n - 1]
        )));
    }
    if n == 1 {
        return Ok((0, 0.0));
    }
    let k = match times.binary_search_by(|p| p.partial_cmp(&t).unwrap()) {
        Ok(k) => return Ok((k, 0.0)),
        Err(k) => k.saturating_sub(1).min(n - 2),
    };
    if (t - times[k]).abs() <= tol {
        return Ok((k, 0.0));
    }
    if (t - times[k + 1]).abs() <= tol {
        return Ok((k + 1, 0.0));
    }
    let theta = ((t - times[k]) / (times[k + 1] - times[k])).clamp(0.0, 1.0);
    Ok((k, theta))
}

/// Row of a `(nt, n)` array at time `t`, linear in time between levels.
pub fn interp_row(arr: &Array2<f64>, times: &[f64], t: f64) -> Result<Vec<f64>> {
    if arr.nrows() != times.len() {
        return Err(Error::TimeGrid(format!(
            "{} rows for {} time levels",
            arr.nrows(),
            times.len()
        )));
    }
    let (k, th) = locate(times, t)?;
    if th == 0.0 {
        return Ok(arr.row(k).to_vec());
    }
    Ok(arr
        .row(k)
        .iter()
        .zip(arr.row(k + 1).iter())
        .map(|(a, b)| (1.0 - th) * a + th * b)
        .collect())
}

/// Check that two time grids agree level by level.
pub fn check_same(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::TimeGrid(format!("{} vs {} levels", a.len(), b.len())));
    }
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        if (x - y).abs() > 1e-12 * x.abs().max(1.0) {
            return Err(Error::TimeGrid(format!("level {k}: t = {x} vs {y}")));
        }
    }
    Ok(())
}

/// `n + 1` uniformly spaced levels on `[0, t_final]`.
pub fn uniform(n: usize, t_final: f64) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    (0..=n)
        .map(|k| if k == n { t_final } else { k as f64 * t_final / n as f64 })
        .collect()
}
