//! Least-squares rates in log-log coordinates.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::export::{row_columns, FIT_COLUMNS};
use super::SweepRow;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub column: String,
    pub slope: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub half_width: f64,
    pub intercept: f64,
    /// Points used; non-positive values are dropped.
    pub n: usize,
}

/// Fit `log err = intercept + slope log eps`. Returns `None` when fewer than
/// three positive points remain.
pub fn fit_rate(points: &[(f64, f64)], column: &str) -> Option<RateFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(e, v)| {
            let ok = *e > 0.0 && *v > 0.0 && v.is_finite();
            if !ok {
                log::warn!("{column}: dropping non-positive point ({e}, {v}) from the fit");
            }
            ok
        })
        .map(|(e, v)| (e.ln(), v.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let dof = nf - 2.0;
    let se = (sse / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof).ok()?.inverse_cdf(0.975);
    Some(RateFit {
        column: column.into(),
        slope,
        half_width: t * se,
        intercept,
        n,
    })
}

/// Fits for every error column that has enough points.
pub fn fit_rows(rows: &[SweepRow]) -> Vec<RateFit> {
    let table: Vec<Vec<(&'static str, Option<f64>)>> = rows.iter().map(row_columns).collect();
    FIT_COLUMNS
        .iter()
        .filter_map(|&col| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .zip(&table)
                .filter_map(|(r, cols)| {
                    cols.iter()
                        .find(|(c, _)| *c == col)
                        .and_then(|(_, v)| *v)
                        .map(|v| (r.epsilon, v))
                })
                .collect();
            fit_rate(&pts, col)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

    #[test]
    fn linear_data_has_unit_slope() {
        let pts: Vec<_> = EPS.iter().map(|&e| (e, e)).collect();
        let f = fit_rate(&pts, "x").unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12 && f.half_width < 1e-12);
    }

    #[test]
    fn constant_drops_out() {
        let pts: Vec<_> = EPS.iter().map(|&e| (e, 3.0 * e * e)).collect();
        let f = fit_rate(&pts, "x").unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 3.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn jittered_exponent_stays_near_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let pts: Vec<_> = EPS
            .iter()
            .map(|&e| (e, e.powf(1.0 + rng.random_range(-0.05..0.05))))
            .collect();
        let f = fit_rate(&pts, "x").unwrap();
        assert!((0.9..=1.1).contains(&f.slope), "{}", f.slope);
        assert!(f.half_width > 0.0);
    }

    #[test]
    fn too_few_positive_points_give_no_fit() {
        assert!(fit_rate(&[(0.1, 0.1), (0.05, 0.05)], "x").is_none());
        let f = fit_rate(&[(0.1, 0.1), (0.05, 0.0), (0.025, 0.025), (0.0125, 0.0125)], "x").unwrap();
        assert_eq!(f.n, 3);
        assert!(fit_rate(&[(0.1, 0.1), (0.05, 0.0), (0.025, 0.025)], "x").is_none());
    }
}
