//! Weighted norms and the operators they are built from.
//!
//! The analytic norm is proxied by a Fourier weight in `x`:
//!
//! ```text
//! |f|_{k,mu}^2 = sum_{a + b <= k} sum_xi exp(2 mu |xi|) |(Z1^a Z2^b f)^(xi, .)|^2_{L2_y}
//! ```
//!
//! with `Z1 = delta d_x`, `Z2 = delta phi(y) d_y` and `phi = y / (1 + y)`.
//! The hat is the discrete Fourier transform in `x`, normalized so that
//! `mu = 0, k = 0` reproduces [`Field2D::l2_norm`].

mod energy;
mod lemmas;

use std::sync::Arc;

use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::Grid2D;
use crate::params::SimParams;
use crate::stencil::{dx4, DiffMatrix};

pub use energy::{energy_diagnostics, EnergyConfig, EnergyDiagnostics, MAX_DIAGNOSTIC_ORDER};
pub use lemmas::{
    band_limited_field, hardy_corpus, product_corpus, random_smooth_field, recovery_corpus,
    trig_gaussian_field, verify_hardy, verify_product_inequality, verify_recovery_inequality,
    write_jsonl, LemmaRecord, PRODUCT_BOUND, PRODUCT_CALIBRATION_MAX,
};

/// Order, radius and weights of one norm evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub k: usize,
    pub mu: f64,
    pub delta: f64,
    pub eta: f64,
    pub lambda: f64,
    pub t: f64,
    /// Base radius; `mu < mu0 - lambda t` is required.
    pub mu0: f64,
}

impl NormSpec {
    pub fn from_params(p: &SimParams, k: usize, mu: f64, t: f64) -> Self {
        NormSpec {
            k,
            mu,
            delta: p.delta,
            eta: p.eta,
            lambda: p.lambda,
            t,
            mu0: p.mu0,
        }
    }

    /// `mu0 - lambda t`.
    pub fn radius_limit(&self) -> f64 {
        self.mu0 - self.lambda * self.t
    }

    /// `h = mu0 - mu - lambda t`.
    pub fn h(&self) -> f64 {
        self.radius_limit() - self.mu
    }

    pub fn validate(&self) -> Result<()> {
        let limit = self.radius_limit();
        if !(self.mu >= 0.0 && self.mu < limit) {
            return Err(Error::NormSpec {
                mu: self.mu,
                limit,
            });
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParam {
                name: "delta",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        NormSpec { mu, ..self.clone() }
    }
}

/// `phi(y) = y / (1 + y)`.
pub fn phi(y: f64) -> f64 {
    y / (1.0 + y)
}

/// Five-point `d_y` on the grid nodes.
fn dy_matrix(grid: &Grid2D) -> DiffMatrix {
    DiffMatrix::new(grid.y_nodes(), 1, 5)
}

/// `d_y f` with five-point stencils (one-sided near the ends).
pub fn dy(f: &Field2D) -> Field2D {
    let m = dy_matrix(f.grid());
    Field2D::from_array(f.grid(), m.apply_columns(f.values())).expect("shape preserved")
}

/// `d_x f` with the fourth-order periodic stencil.
pub fn dx(f: &Field2D) -> Field2D {
    Field2D::from_array(f.grid(), dx4(f.values(), f.grid().dx())).expect("shape preserved")
}

fn z2(f: &Array2<f64>, m: &DiffMatrix, phis: &[f64], delta: f64) -> Array2<f64> {
    let mut out = m.apply_columns(f);
    for mut row in out.rows_mut() {
        for (v, p) in row.iter_mut().zip(phis) {
            *v *= delta * p;
        }
    }
    out
}

/// `Z1^a Z2^b f` for `alpha = (a0, a, b)`. Time derivatives need a
/// trajectory; see [`conormal_derivative_in_time`].
pub fn conormal_derivative(f: &Field2D, alpha: [usize; 3], delta: f64) -> Result<Field2D> {
    if alpha[0] > 0 {
        return Err(Error::Domain(
            "time conormal derivatives need a trajectory, not a single field".into(),
        ));
    }
    let g = f.grid();
    let m = dy_matrix(g);
    let phis: Vec<f64> = g.y_nodes().iter().map(|&y| phi(y)).collect();
    let mut a = f.values().clone();
    for _ in 0..alpha[2] {
        a = z2(&a, &m, &phis, delta);
    }
    for _ in 0..alpha[1] {
        a = dx4(&a, g.dx()) * delta;
    }
    Field2D::from_array(g, a)
}

/// `Z0^{a0} Z1^a Z2^b` at level `n` of a uniformly spaced series, with
/// `Z0 = delta d_t` by three-point differences (one-sided at the ends).
pub fn conormal_derivative_in_time(
    series: &[Field2D],
    times: &[f64],
    n: usize,
    alpha: [usize; 3],
    delta: f64,
) -> Result<Field2D> {
    if series.len() != times.len() || n >= series.len() {
        return Err(Error::TimeGrid("series and times disagree".into()));
    }
    let spatial = |f: &Field2D| conormal_derivative(f, [0, alpha[1], alpha[2]], delta);
    if alpha[0] == 0 {
        return spatial(&series[n]);
    }
    if series.len() < 3 {
        return Err(Error::InsufficientLevels {
            needed: 3,
            got: series.len(),
        });
    }
    // apply Z0 a0 times on the whole series, then pick level n
    let mut cur: Vec<Field2D> = series.iter().map(spatial).collect::<Result<_>>()?;
    for _ in 0..alpha[0] {
        cur = (0..cur.len())
            .map(|k| {
                let idx = if k == 0 {
                    [0, 1, 2]
                } else if k + 1 == cur.len() {
                    [k - 2, k - 1, k]
                } else {
                    [k - 1, k, k + 1]
                };
                let ts: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
                let w = &crate::stencil::fornberg(times[k], &ts, 1)[1];
                let mut a = Array2::zeros(cur[k].values().dim());
                for (&i, &c) in idx.iter().zip(w) {
                    a.scaled_add(delta * c, cur[i].values());
                }
                Field2D::from_array(cur[k].grid(), a)
            })
            .collect::<Result<_>>()?;
    }
    Ok(cur.swap_remove(n))
}

/// Hardy average `(1/y) int_0^y f`, cumulative trapezoid; `f(x, 0)` at the wall.
pub fn hardy_apply(f: &Field2D) -> Field2D {
    let y = f.grid().y_nodes();
    let mut out = f.values().clone();
    for (row, mut o) in f.values().rows().into_iter().zip(out.rows_mut()) {
        let mut acc = 0.0;
        o[0] = row[0];
        for j in 1..y.len() {
            acc += 0.5 * (y[j] - y[j - 1]) * (row[j] + row[j - 1]);
            o[j] = acc / y[j];
        }
    }
    Field2D::from_array(f.grid(), out).expect("shape preserved")
}

/// Power spectrum in `x` of each `y` line: `|f^(m, j)|^2` with
/// `f^ = (1/nx) sum_i f_i exp(-i xi_m x_i)`, stored as `(nx, ny)`.
pub(crate) fn power_spectrum(f: &Array2<f64>) -> Array2<f64> {
    let (nx, ny) = f.dim();
    let fft = FftPlanner::new().plan_fft_forward(nx);
    let mut out = Array2::zeros((nx, ny));
    let mut buf = vec![Complex::new(0.0, 0.0); nx];
    let scale = 1.0 / (nx * nx) as f64;
    for j in 0..ny {
        for i in 0..nx {
            buf[i] = Complex::new(f[(i, j)], 0.0);
        }
        fft.process(&mut buf);
        for m in 0..nx {
            out[(m, j)] = buf[m].norm_sqr() * scale;
        }
    }
    out
}

/// `|xi_m|` for DFT index `m`.
pub(crate) fn wavenumbers(grid: &Grid2D) -> Vec<f64> {
    let nx = grid.nx();
    let k0 = grid.k0();
    (0..nx)
        .map(|m| k0 * (if m <= nx / 2 { m } else { nx - m }) as f64)
        .collect()
}

/// Symbol magnitude of the fourth-order stencil `d_x` at wavenumber `xi`.
fn dx4_symbol(xi: f64, h: f64) -> f64 {
    ((8.0 * (xi * h).sin() - (2.0 * xi * h).sin()) / (6.0 * h)).abs()
}

/// The spectral data a family of norms needs: for each `b <= k` the power
/// spectrum of `Z2^b f`, and the symbol of `Z1` per mode.
pub(crate) struct ConormalSpectra {
    pub grid: Arc<Grid2D>,
    pub k: usize,
    /// `spectra[b]` holds `|(Z2^b f)^|^2`.
    pub spectra: Vec<Array2<f64>>,
    /// `|delta D(xi_m)|^2` for the stencil derivative `D`.
    pub z1_sq: Vec<f64>,
    pub xi: Vec<f64>,
}

impl ConormalSpectra {
    pub fn new(f: &Field2D, k: usize, delta: f64) -> Self {
        let g = f.grid();
        let m = dy_matrix(g);
        let phis: Vec<f64> = g.y_nodes().iter().map(|&y| phi(y)).collect();
        let mut a = f.values().clone();
        let mut spectra = Vec::with_capacity(k + 1);
        for b in 0..=k {
            if b > 0 {
                a = z2(&a, &m, &phis, delta);
            }
            spectra.push(power_spectrum(&a));
        }
        let xi = wavenumbers(g);
        let z1_sq = xi.iter().map(|&x| (delta * dx4_symbol(x, g.dx())).powi(2)).collect();
        ConormalSpectra {
            grid: Arc::clone(g),
            k,
            spectra,
            z1_sq,
            xi,
        }
    }

    /// `sum_{a+b<=k} sum_m weight(xi_m) |(Z1^a Z2^b f)^(m, .)|^2_{L2_y}`, times `Lx`.
    pub fn weighted(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let w = self.grid.cell_widths();
        let nx = self.xi.len();
        let mut total = 0.0;
        for (b, spec) in self.spectra.iter().enumerate() {
            for m in 0..nx {
                let z = self.z1_sq[m];
                // sum_{a <= k - b} z^a
                let mut geo = 0.0;
                let mut p = 1.0;
                for _ in 0..=(self.k - b) {
                    geo += p;
                    p *= z;
                }
                let line: f64 = spec.row(m).iter().zip(w).map(|(s, h)| s * h).sum();
                total += weight(self.xi[m]) * geo * line;
            }
        }
        total * self.grid.lx()
    }
}

/// Squared proxy norm.
pub fn gevrey_norm_sq(f: &Field2D, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    let s = ConormalSpectra::new(f, spec.k, spec.delta);
    let mu = spec.mu;
    Ok(s.weighted(|xi| (2.0 * mu * xi).exp()))
}

/// The analytic-norm proxy `|f|_{k,mu}`.
pub fn gevrey_norm(f: &Field2D, spec: &NormSpec) -> Result<f64> {
    gevrey_norm_sq(f, spec).map(f64::sqrt)
}
