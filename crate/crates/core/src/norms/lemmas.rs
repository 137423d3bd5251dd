//! Discrete checks of the Hardy, recovery and product inequalities.

use std::f64::consts::{E, PI};
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dy, hardy_apply, ConormalSpectra};
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::Grid2D;

/// Largest empirical product constant seen on the seeded calibration corpus
/// (`product_corpus(grid 32x81, seed 7)`, `k = 8`, `mu = 0.005`, `delta = 0.1`).
pub const PRODUCT_CALIBRATION_MAX: f64 = 1.033_325_979_767_634_3e-2;
/// Regression bound: 1.5 times the calibration maximum.
pub const PRODUCT_BOUND: f64 = 1.5 * PRODUCT_CALIBRATION_MAX;

/// One line of a lemma-verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub lemma: String,
    pub sample_id: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl LemmaRecord {
    fn new(lemma: &str, sample_id: usize, lhs: f64, rhs: f64, bound: f64) -> Self {
        let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
        LemmaRecord {
            lemma: lemma.into(),
            sample_id,
            lhs,
            rhs,
            ratio,
            pass: ratio.is_finite() && ratio <= bound,
        }
    }
}

pub fn write_jsonl(records: &[LemmaRecord], mut w: impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// `|L f|_{L2} <= (2 + 5 dy_max) |f|_{L2}`.
pub fn verify_hardy(f: &Field2D, sample_id: usize) -> LemmaRecord {
    let bound = 2.0 + 5.0 * f.grid().dy_max();
    LemmaRecord::new("hardy", sample_id, hardy_apply(f).l2_norm(), f.l2_norm(), bound)
}

/// `(mu' - mu) |d_x f|_{k,mu} <= e^{-1} |f|_{k,mu'}`, with `d_x` spectral so the
/// per-mode bound `s exp(-(mu' - mu) s) <= 1 / (e (mu' - mu))` is exact.
pub fn verify_recovery_inequality(
    f: &Field2D,
    mu: f64,
    mu_prime: f64,
    k: usize,
    delta: f64,
    sample_id: usize,
) -> Result<LemmaRecord> {
    if !(mu_prime > mu && mu >= 0.0) {
        return Err(Error::Domain(format!(
            "recovery needs 0 <= mu < mu'; got mu={mu}, mu'={mu_prime}"
        )));
    }
    let s = ConormalSpectra::new(f, k, delta);
    let lhs = (mu_prime - mu) * s.weighted(|xi| xi * xi * (2.0 * mu * xi).exp()).sqrt();
    let rhs = s.weighted(|xi| (2.0 * mu_prime * xi).exp()).sqrt();
    Ok(LemmaRecord::new("recovery", sample_id, lhs, rhs, 1.0 / E + 1e-12))
}

/// Empirical constant of
/// `|fg| <= C delta^{-1} [(|f| + |d_y f|) |g| + (|g| + |d_y g|) |f|]`,
/// all norms at `(k, mu)`. Passes when `C` sits below [`PRODUCT_BOUND`].
pub fn verify_product_inequality(
    f: &Field2D,
    g: &Field2D,
    k: usize,
    mu: f64,
    delta: f64,
    sample_id: usize,
) -> Result<LemmaRecord> {
    if k < 8 {
        return Err(Error::InvalidParam {
            name: "k",
            reason: format!("product inequality needs k >= 8, got {k}"),
        });
    }
    if !Arc::ptr_eq(f.grid(), g.grid()) && f.grid() != g.grid() {
        return Err(Error::Domain("product factors live on different grids".into()));
    }
    let norm = |h: &Field2D| {
        ConormalSpectra::new(h, k, delta)
            .weighted(|xi| (2.0 * mu * xi).exp())
            .sqrt()
    };
    let fg = f.zip_with(g, |a, b| a * b);
    let (nf, ng) = (norm(f), norm(g));
    let rhs = ((nf + norm(&dy(f))) * ng + (ng + norm(&dy(g))) * nf) / delta;
    Ok(LemmaRecord::new("product", sample_id, norm(&fg), rhs, PRODUCT_BOUND))
}

/// A few low `x` modes times a decaying, wall-weighted `y` profile. Some
/// samples are not zero at the wall, so the Hardy average sees both kinds.
pub fn random_smooth_field(grid: &Arc<Grid2D>, rng: &mut impl Rng) -> Field2D {
    let modes: Vec<(f64, f64, f64)> = (0..4)
        .map(|m| {
            (
                m as f64,
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let decay = rng.random_range(0.3..3.0);
    let power = rng.random_range(0.0..3.0_f64).floor();
    let offset = rng.random_range(-0.5..0.5);
    Field2D::from_fn(grid, |x, y| {
        let sx: f64 = modes.iter().map(|(m, a, p)| a * (m * x + p).cos()).sum();
        (sx + offset) * y.powf(power) * (-y / decay).exp()
    })
}

/// Random Fourier coefficients up to `|m| <= m_max`, each with its own
/// exponential profile in `y`.
pub fn band_limited_field(grid: &Arc<Grid2D>, m_max: usize, rng: &mut impl Rng) -> Field2D {
    let modes: Vec<(f64, f64, f64, f64)> = (0..=m_max)
        .map(|m| {
            (
                m as f64,
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.2..2.0),
            )
        })
        .collect();
    Field2D::from_fn(grid, |x, y| {
        modes
            .iter()
            .map(|(m, a, p, l)| a * (m * x + p).cos() * (-y / l).exp())
            .sum()
    })
}

/// `sum_m a_m cos(m x + p_m) exp(-((y - c) / w)^2)` with random centre and width.
pub fn trig_gaussian_field(grid: &Arc<Grid2D>, rng: &mut impl Rng) -> Field2D {
    let modes: Vec<(f64, f64, f64)> = (0..5)
        .map(|m| {
            (
                m as f64,
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let c = rng.random_range(0.2..2.0);
    let w = rng.random_range(0.3..1.0);
    Field2D::from_fn(grid, |x, y| {
        let sx: f64 = modes.iter().map(|(m, a, p)| a * (m * x + p).cos()).sum();
        sx * (-((y - c) / w).powi(2)).exp()
    })
}

fn rngs(seed: u64, n: usize) -> Vec<ChaCha8Rng> {
    (0..n as u64)
        .map(|i| ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(i)))
        .collect()
}

pub fn hardy_corpus(grid: &Arc<Grid2D>, n: usize, seed: u64) -> Vec<LemmaRecord> {
    rngs(seed, n)
        .into_par_iter()
        .enumerate()
        .map(|(i, mut r)| verify_hardy(&random_smooth_field(grid, &mut r), i))
        .collect()
}

pub fn recovery_corpus(
    grid: &Arc<Grid2D>,
    n: usize,
    seed: u64,
    k: usize,
    delta: f64,
) -> Result<Vec<LemmaRecord>> {
    let m_max = grid.nx() / 4;
    rngs(seed, n)
        .into_par_iter()
        .enumerate()
        .map(|(i, mut r)| {
            let f = band_limited_field(grid, m_max, &mut r);
            let mu = r.random_range(0.0..0.5);
            let mu_prime = mu + r.random_range(0.05..1.0);
            verify_recovery_inequality(&f, mu, mu_prime, k, delta, i)
        })
        .collect()
}

pub fn product_corpus(
    grid: &Arc<Grid2D>,
    n: usize,
    seed: u64,
    k: usize,
    mu: f64,
    delta: f64,
) -> Result<Vec<LemmaRecord>> {
    rngs(seed, n)
        .into_par_iter()
        .enumerate()
        .map(|(i, mut r)| {
            let f = trig_gaussian_field(grid, &mut r);
            let g = trig_gaussian_field(grid, &mut r);
            verify_product_inequality(&f, &g, k, mu, delta, i)
        })
        .collect()
}
