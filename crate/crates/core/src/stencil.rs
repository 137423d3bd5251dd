//! Finite-difference weights on nonuniform nodes and periodic stencils.

use ndarray::{Array2, ArrayView1, ArrayViewMut1};

/// Fornberg's algorithm: weights `w[m][k]` such that
/// `f^(m)(x0) ~ sum_k w[m][k] f(xs[k])` for `m = 0..=max_deriv`.
pub fn fornberg(x0: f64, xs: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_deriv + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Banded differentiation operator on a nonuniform 1-D grid.
///
/// Every row uses `width` consecutive nodes; rows near either end shift
/// the window inward so the stencil turns one-sided.
#[derive(Clone, Debug)]
pub struct DiffMatrix {
    start: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

impl DiffMatrix {
    pub fn new(nodes: &[f64], deriv: usize, width: usize) -> Self {
        let n = nodes.len();
        assert!(width <= n && width > deriv, "stencil width {width} invalid for {n} nodes");
        let mut start = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            let s = j.saturating_sub(width / 2).min(n - width);
            let w = fornberg(nodes[j], &nodes[s..s + width], deriv);
            start.push(s);
            weights.push(w[deriv].clone());
        }
        DiffMatrix { start, weights }
    }

    /// Like [`DiffMatrix::new`] but the first and last rows use `edge_width` nodes.
    pub fn with_edges(nodes: &[f64], deriv: usize, width: usize, edge_width: usize) -> Self {
        let mut m = Self::new(nodes, deriv, width);
        let n = nodes.len();
        for j in [0, n - 1] {
            let s = if j == 0 { 0 } else { n - edge_width };
            m.start[j] = s;
            m.weights[j] = fornberg(nodes[j], &nodes[s..s + edge_width], deriv)[deriv].clone();
        }
        m
    }

    pub fn len(&self) -> usize {
        self.start.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_empty()
    }

    #[inline]
    pub fn row(&self, j: usize) -> (usize, &[f64]) {
        (self.start[j], &self.weights[j])
    }

    #[inline]
    pub fn apply_at(&self, f: ArrayView1<f64>, j: usize) -> f64 {
        let (s, w) = self.row(j);
        w.iter().enumerate().map(|(k, wk)| wk * f[s + k]).sum()
    }

    pub fn apply(&self, f: ArrayView1<f64>, mut out: ArrayViewMut1<f64>) {
        for j in 0..self.len() {
            out[j] = self.apply_at(f, j);
        }
    }

    /// Apply along the second axis of an `(nx, n)` array.
    pub fn apply_columns(&self, f: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros(f.dim());
        for (row, out_row) in f.rows().into_iter().zip(out.rows_mut()) {
            self.apply(row, out_row);
        }
        out
    }
}

/// Fourth-order periodic first derivative along the first axis (uniform spacing `h`).
pub fn dx4(f: &Array2<f64>, h: f64) -> Array2<f64> {
    let (nx, ny) = f.dim();
    let mut out = Array2::zeros((nx, ny));
    let c = 1.0 / (12.0 * h);
    for i in 0..nx {
        let im2 = (i + nx - 2) % nx;
        let im1 = (i + nx - 1) % nx;
        let ip1 = (i + 1) % nx;
        let ip2 = (i + 2) % nx;
        for j in 0..ny {
            out[(i, j)] =
                c * (-f[(ip2, j)] + 8.0 * f[(ip1, j)] - 8.0 * f[(im1, j)] + f[(im2, j)]);
        }
    }
    out
}

/// Fourth-order periodic second derivative along the first axis.
pub fn dxx4(f: &Array2<f64>, h: f64) -> Array2<f64> {
    let (nx, ny) = f.dim();
    let mut out = Array2::zeros((nx, ny));
    let c = 1.0 / (12.0 * h * h);
    for i in 0..nx {
        let im2 = (i + nx - 2) % nx;
        let im1 = (i + nx - 1) % nx;
        let ip1 = (i + 1) % nx;
        let ip2 = (i + 2) % nx;
        for j in 0..ny {
            out[(i, j)] = c
                * (-f[(ip2, j)] + 16.0 * f[(ip1, j)] - 30.0 * f[(i, j)] + 16.0 * f[(im1, j)]
                    - f[(im2, j)]);
        }
    }
    out
}

/// Fourth-order periodic derivative of a 1-D periodic sample.
pub fn dx4_1d(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let c = 1.0 / (12.0 * h);
    (0..n)
        .map(|i| {
            c * (-f[(i + 2) % n] + 8.0 * f[(i + 1) % n] - 8.0 * f[(i + n - 1) % n]
                + f[(i + n - 2) % n])
        })
        .collect()
}
