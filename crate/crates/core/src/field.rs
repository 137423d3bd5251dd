//! Scalar fields on the physical and boundary-layer grids.

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::{BLGrid, Grid2D};

/// Scalar field on a [`Grid2D`], stored as an `(nx, ny)` array.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    grid: Arc<Grid2D>,
    values: Array2<f64>,
}

impl Field2D {
    pub fn zeros(grid: &Arc<Grid2D>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<Grid2D>, c: f64) -> Self {
        Field2D {
            grid: Arc::clone(grid),
            values: Array2::from_elem((grid.nx(), grid.ny()), c),
        }
    }

    pub fn from_fn(grid: &Arc<Grid2D>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn((grid.nx(), grid.ny()), |(i, j)| {
            f(grid.x(i), grid.y(j))
        });
        Field2D {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn from_array(grid: &Arc<Grid2D>, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (grid.nx(), grid.ny()) {
            return Err(Error::Domain(format!(
                "array shape {:?} does not match grid ({}, {})",
                values.dim(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(Field2D {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }
    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Field2D {
            grid: Arc::clone(&self.grid),
            values: self.values.mapv(f),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(integral of f^2 dx dy)^(1/2)` with trapezoid weights in `y`.
    pub fn l2_norm(&self) -> f64 {
        let dx = self.grid.dx();
        let w = self.grid.cell_widths();
        let mut s = 0.0;
        for row in self.values.rows() {
            for (v, wj) in row.iter().zip(w) {
                s += v * v * wj;
            }
        }
        (s * dx).sqrt()
    }

    /// [`Field2D::l2_norm`] restricted to `y <= y_cut`, with trapezoid
    /// weights on the retained nodes.
    pub fn l2_norm_below(&self, y_cut: f64) -> f64 {
        let y = self.grid.y_nodes();
        let m = y.iter().take_while(|&&v| v <= y_cut * (1.0 + 1e-12)).count();
        let mut s = 0.0;
        for row in self.values.rows() {
            for j in 0..m.saturating_sub(1) {
                let h = y[j + 1] - y[j];
                s += 0.5 * h * (row[j] * row[j] + row[j + 1] * row[j + 1]);
            }
        }
        (s * self.grid.dx()).sqrt()
    }

    /// Largest `|f|` over nodes with `y <= y_cut`.
    pub fn max_abs_below(&self, y_cut: f64) -> f64 {
        let y = self.grid.y_nodes();
        let mut m = 0.0_f64;
        for row in self.values.rows() {
            for (v, &yj) in row.iter().zip(y) {
                if yj <= y_cut * (1.0 + 1e-12) {
                    m = m.max(v.abs());
                }
            }
        }
        m
    }

    /// `integral of f dx dy`.
    pub fn integral(&self) -> f64 {
        let dx = self.grid.dx();
        let w = self.grid.cell_widths();
        let mut s = 0.0;
        for row in self.values.rows() {
            for (v, wj) in row.iter().zip(w) {
                s += v * wj;
            }
        }
        s * dx
    }

    /// Cyclic shift by `shift` nodes in `x`.
    pub fn shift_x(&self, shift: usize) -> Self {
        let nx = self.grid.nx();
        let values = Array2::from_shape_fn(self.values.dim(), |(i, j)| {
            self.values[((i + nx - shift % nx) % nx, j)]
        });
        Field2D {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    /// Wall row `f(x, 0)`.
    pub fn wall(&self) -> Vec<f64> {
        self.values.column(0).to_vec()
    }

    pub fn zip_with(&self, other: &Field2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = self.values.clone();
        values.zip_mut_with(&other.values, |a, &b| *a = f(*a, b));
        Field2D {
            grid: Arc::clone(&self.grid),
            values,
        }
    }
}

/// A `(rho, u, v)` triple at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub rho: Field2D,
    pub u: Field2D,
    pub v: Field2D,
    pub t: f64,
}

impl State {
    pub fn grid(&self) -> &Arc<Grid2D> {
        self.rho.grid()
    }

    pub fn rest(grid: &Arc<Grid2D>) -> Self {
        State {
            rho: Field2D::constant(grid, 1.0),
            u: Field2D::zeros(grid),
            v: Field2D::zeros(grid),
            t: 0.0,
        }
    }

    pub fn zeros(grid: &Arc<Grid2D>, t: f64) -> Self {
        State {
            rho: Field2D::zeros(grid),
            u: Field2D::zeros(grid),
            v: Field2D::zeros(grid),
            t,
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        for (name, f) in [("rho", &self.rho), ("u", &self.u), ("v", &self.v)] {
            if !f.is_finite() {
                return Err(Error::NonFinite { field: name, t: self.t });
            }
        }
        Ok(())
    }

    pub fn check_density_floor(&self, floor: f64) -> Result<()> {
        for ((i, j), &r) in self.rho.values().indexed_iter() {
            if !(r >= floor) {
                return Err(Error::DensityFloor {
                    i,
                    j,
                    value: r,
                    floor,
                    t: self.t,
                });
            }
        }
        Ok(())
    }

    pub fn shift_x(&self, shift: usize) -> Self {
        State {
            rho: self.rho.shift_x(shift),
            u: self.u.shift_x(shift),
            v: self.v.shift_x(shift),
            t: self.t,
        }
    }

    /// Componentwise `self - other`.
    pub fn diff(&self, other: &State) -> State {
        State {
            rho: self.rho.zip_with(&other.rho, |a, b| a - b),
            u: self.u.zip_with(&other.u, |a, b| a - b),
            v: self.v.zip_with(&other.v, |a, b| a - b),
            t: self.t,
        }
    }

    pub fn scale(&self, c: f64) -> State {
        State {
            rho: self.rho.map(|v| c * v),
            u: self.u.map(|v| c * v),
            v: self.v.map(|v| c * v),
            t: self.t,
        }
    }

    /// Largest `|u| + |v| + c` over the grid.
    pub fn max_wave_speed(&self, params: &crate::params::SimParams) -> f64 {
        let mut m = 0.0_f64;
        for ((r, u), v) in self
            .rho
            .values()
            .iter()
            .zip(self.u.values())
            .zip(self.v.values())
        {
            m = m.max(u.abs() + v.abs() + params.sound_speed_sq(r.max(0.0)).sqrt());
        }
        m
    }
}

/// Scalar field on a [`BLGrid`], stored as an `(nx, nz)` array.
#[derive(Clone, Debug, PartialEq)]
pub struct BLField {
    grid: Arc<BLGrid>,
    values: Array2<f64>,
    /// Gaussian weight exponent used by decay diagnostics.
    pub decay_rate: f64,
}

impl BLField {
    pub fn zeros(grid: &Arc<BLGrid>) -> Self {
        BLField {
            grid: Arc::clone(grid),
            values: Array2::zeros((grid.nx(), grid.nz())),
            decay_rate: 2.0,
        }
    }

    pub fn from_fn(grid: &Arc<BLGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let dx = grid.dx();
        let z = grid.z_nodes();
        BLField {
            grid: Arc::clone(grid),
            values: Array2::from_shape_fn((grid.nx(), grid.nz()), |(i, k)| f(i as f64 * dx, z[k])),
            decay_rate: 2.0,
        }
    }

    pub fn from_array(grid: &Arc<BLGrid>, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (grid.nx(), grid.nz()) {
            return Err(Error::Domain(format!(
                "array shape {:?} does not match boundary-layer grid ({}, {})",
                values.dim(),
                grid.nx(),
                grid.nz()
            )));
        }
        Ok(BLField {
            grid: Arc::clone(grid),
            values,
            decay_rate: 2.0,
        })
    }

    pub fn grid(&self) -> &Arc<BLGrid> {
        &self.grid
    }
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
    /// Largest `|f|` on the outermost z row relative to `max |f|` (0 for a zero field).
    pub fn tail_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let nz = self.grid.nz();
        self.values
            .column(nz - 1)
            .iter()
            .fold(0.0_f64, |a, v| a.max(v.abs()))
            / m
    }
    pub fn scale(&self, c: f64) -> BLField {
        BLField {
            grid: Arc::clone(&self.grid),
            values: self.values.mapv(|v| c * v),
            decay_rate: self.decay_rate,
        }
    }
}
