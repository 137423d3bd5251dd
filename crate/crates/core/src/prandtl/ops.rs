//! Discrete operators on the boundary-layer grid.

use std::sync::Arc;

use ndarray::{Array2, Zip};

use crate::error::Result;
use crate::grid::BLGrid;
use crate::linalg::thomas;
use crate::stencil::{dx4, fornberg, DiffMatrix};

/// Decay constant `alpha` of the Gaussian tail `f ~ exp(-alpha z^2)` assumed
/// beyond `z_max`.
pub const TAIL_ALPHA: f64 = 0.125;

/// Precomputed z stencils for one [`BLGrid`].
#[derive(Clone, Debug)]
pub struct BLOps {
    pub grid: Arc<BLGrid>,
    pub d1: DiffMatrix,
    pub d2: DiffMatrix,
    /// Per interval `[z_k, z_{k+1}]`: first node and weights of the quintic
    /// interpolant's integral.
    quad: Vec<(usize, [f64; QW])>,
}

const QW: usize = 6;

/// Integral over `[a, b]` of the quintic through six nodes, via three-point
/// Gauss-Legendre (exact for quintics).
fn interval_weights(xs: &[f64], a: f64, b: f64) -> [f64; QW] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let g = half * 0.6f64.sqrt();
    let mut w = [0.0; QW];
    for (x0, gw) in [(mid - g, 5.0 / 9.0), (mid, 8.0 / 9.0), (mid + g, 5.0 / 9.0)] {
        let l = &fornberg(x0, xs, 0)[0];
        for j in 0..QW {
            w[j] += gw * half * l[j];
        }
    }
    w
}

impl BLOps {
    pub fn new(grid: &Arc<BLGrid>) -> Self {
        let z = grid.z_nodes();
        BLOps {
            grid: Arc::clone(grid),
            d1: DiffMatrix::new(z, 1, 3),
            d2: DiffMatrix::new(z, 2, 3),
            quad: (0..z.len() - 1)
                .map(|k| {
                    let s = k.saturating_sub(QW / 2 - 1).min(z.len() - QW);
                    (s, interval_weights(&z[s..s + QW], z[k], z[k + 1]))
                })
                .collect(),
        }
    }

    pub fn dx(&self, f: &Array2<f64>) -> Array2<f64> {
        dx4(f, self.grid.dx())
    }

    pub fn dz(&self, f: &Array2<f64>) -> Array2<f64> {
        self.d1.apply_columns(f)
    }

    pub fn dzz(&self, f: &Array2<f64>) -> Array2<f64> {
        self.d2.apply_columns(f)
    }

    /// `int_z^inf f dz'` per x column: piecewise-cubic quadrature from the
    /// top plus a Gaussian tail estimate `f(z_max) / (2 alpha z_max)`.
    pub fn integral_from_top(&self, f: &Array2<f64>) -> Array2<f64> {
        let z = self.grid.z_nodes();
        let nz = z.len();
        let zm = z[nz - 1];
        let mut out = Array2::zeros(f.dim());
        for (row, mut o) in f.rows().into_iter().zip(out.rows_mut()) {
            let mut acc = row[nz - 1] / (2.0 * TAIL_ALPHA * zm);
            o[nz - 1] = acc;
            for k in (0..nz - 1).rev() {
                let (s, w) = &self.quad[k];
                acc += (0..QW).map(|j| w[j] * row[s + j]).sum::<f64>();
                o[k] = acc;
            }
        }
        out
    }

    /// `(1/rho) int_z^inf d_x(rho f) dz'`, the normal velocity carried by a
    /// tangential perturbation `f` through the weighted divergence.
    pub fn normal_velocity(&self, f: &Array2<f64>, rho: &[f64]) -> Array2<f64> {
        let mut rf = f.clone();
        for (mut row, r) in rf.rows_mut().into_iter().zip(rho) {
            row.mapv_inplace(|v| v * r);
        }
        let mut v = self.integral_from_top(&self.dx(&rf));
        for (mut row, r) in v.rows_mut().into_iter().zip(rho) {
            row.mapv_inplace(|x| x / r);
        }
        v
    }

    /// `diff[i] * d_zz f` in the interior, zero in the Dirichlet rows.
    pub fn diffuse(&self, f: &Array2<f64>, diff: &[f64]) -> Array2<f64> {
        let nz = self.grid.nz();
        let mut out = self.dzz(f);
        for (mut row, d) in out.rows_mut().into_iter().zip(diff) {
            row.mapv_inplace(|v| v * d);
            row[0] = 0.0;
            row[nz - 1] = 0.0;
        }
        out
    }

    /// Solve `(I - theta diff[i] d_zz) u = rhs` column by column with
    /// Dirichlet values `wall[i]` at `z = 0` and 0 at `z_max`.
    pub fn implicit_solve(
        &self,
        rhs: &mut Array2<f64>,
        theta: f64,
        diff: &[f64],
        wall: &[f64],
    ) -> Result<()> {
        let nz = self.grid.nz();
        let mut lower = vec![0.0; nz];
        let mut diag = vec![1.0; nz];
        let mut upper = vec![0.0; nz];
        let mut scratch = vec![0.0; nz];
        let mut col = vec![0.0; nz];
        for (i, mut row) in rhs.rows_mut().into_iter().enumerate() {
            let c = theta * diff[i];
            for k in 1..nz - 1 {
                let (s, w) = self.d2.row(k);
                debug_assert_eq!(s, k - 1);
                lower[k] = -c * w[0];
                diag[k] = 1.0 - c * w[1];
                upper[k] = -c * w[2];
            }
            lower[0] = 0.0;
            diag[0] = 1.0;
            upper[0] = 0.0;
            lower[nz - 1] = 0.0;
            diag[nz - 1] = 1.0;
            upper[nz - 1] = 0.0;
            for k in 0..nz {
                col[k] = row[k];
            }
            col[0] = wall[i];
            col[nz - 1] = 0.0;
            thomas(&lower, &diag, &upper, &mut col, &mut scratch)?;
            for k in 0..nz {
                row[k] = col[k];
            }
        }
        Ok(())
    }

    /// Rows of `a` multiplied by per-row factors.
    pub fn scale_rows(a: &Array2<f64>, s: &[f64]) -> Array2<f64> {
        let mut out = a.clone();
        for (mut row, c) in out.rows_mut().into_iter().zip(s) {
            row.mapv_inplace(|v| v * c);
        }
        out
    }

    /// `z`-dependent coefficient `a[i] * z + b[i]` broadcast over the grid.
    pub fn affine_in_z(&self, a: &[f64], b: &[f64]) -> Array2<f64> {
        let z = self.grid.z_nodes();
        Array2::from_shape_fn((self.grid.nx(), z.len()), |(i, k)| a[i] * z[k] + b[i])
    }

    /// Largest `|f|` over nodes with `z >= 0.9 z_max`, relative to `max |f|`.
    pub fn tail_ratio(&self, f: &Array2<f64>) -> f64 {
        let z = self.grid.z_nodes();
        let zc = 0.9 * self.grid.z_max();
        let total = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if total == 0.0 {
            return 0.0;
        }
        let mut tail = 0.0_f64;
        Zip::indexed(f).for_each(|(_, k), v| {
            if z[k] >= zc {
                tail = tail.max(v.abs());
            }
        });
        tail / total
    }
}
