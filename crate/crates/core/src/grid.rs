//! Half-space and boundary-layer grids.
//!
//! Both grids are periodic in `x` with uniform spacing. The physical grid
//! clusters nodes toward the wall `y = 0` with a tanh map; the
//! boundary-layer grid is algebraically stretched in the fast variable
//! `z = y / epsilon`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// JSON description of a physical grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub y_max: f64,
    /// tanh clustering strength; 0 gives a uniform grid.
    pub stretch: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    y_max: f64,
    stretch: f64,
    y_nodes: Vec<f64>,
    /// Dual-cell widths around each node; also the trapezoid weights.
    cell_widths: Vec<f64>,
}

fn tanh_map(s: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        s
    } else {
        1.0 - (beta * (1.0 - s)).tanh() / beta.tanh()
    }
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, y_max: f64, stretch: f64) -> Result<Self> {
        if nx < 4 || ny < 5 {
            return Err(Error::Config(format!(
                "grid too small: nx = {nx} (need >= 4), ny = {ny} (need >= 5)"
            )));
        }
        if !(lx > 0.0 && y_max > 0.0 && stretch >= 0.0 && stretch.is_finite()) {
            return Err(Error::Config(
                "grid needs lx > 0, y_max > 0 and stretch >= 0".into(),
            ));
        }
        let y_nodes: Vec<f64> = (0..ny)
            .map(|j| {
                if j == 0 {
                    0.0
                } else if j == ny - 1 {
                    y_max
                } else {
                    y_max * tanh_map(j as f64 / (ny - 1) as f64, stretch)
                }
            })
            .collect();
        Ok(Self::from_nodes(nx, lx, stretch, y_nodes))
    }

    /// Grid whose first wall spacing equals `dy_min` (or a uniform grid when
    /// uniform spacing is already finer).
    pub fn with_wall_spacing(
        nx: usize,
        ny: usize,
        lx: f64,
        y_max: f64,
        dy_min: f64,
    ) -> Result<Self> {
        let uniform = y_max / (ny - 1).max(1) as f64;
        if dy_min >= uniform {
            return Self::new(nx, ny, lx, y_max, 0.0);
        }
        let first = |beta: f64| y_max * tanh_map(1.0 / (ny - 1) as f64, beta);
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while first(hi) > dy_min {
            hi *= 2.0;
            if hi > 64.0 {
                return Err(Error::Config(format!(
                    "cannot reach wall spacing {dy_min:e} with ny = {ny}"
                )));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if first(mid) > dy_min {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::new(nx, ny, lx, y_max, 0.5 * (lo + hi))
    }

    /// Grid from explicit `y` nodes (strictly increasing, starting at 0).
    pub fn from_y_nodes(nx: usize, lx: f64, y_nodes: Vec<f64>) -> Result<Self> {
        if y_nodes.len() < 5 || y_nodes[0] != 0.0 {
            return Err(Error::Config("y nodes must start at 0 and number >= 5".into()));
        }
        if y_nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("y nodes must be strictly increasing".into()));
        }
        if nx < 4 || !(lx > 0.0) {
            return Err(Error::Config("need nx >= 4 and lx > 0".into()));
        }
        Ok(Self::from_nodes(nx, lx, f64::NAN, y_nodes))
    }

    fn from_nodes(nx: usize, lx: f64, stretch: f64, y_nodes: Vec<f64>) -> Self {
        let ny = y_nodes.len();
        let mut cell_widths = vec![0.0; ny];
        for j in 0..ny {
            let lo = if j == 0 { 0.0 } else { 0.5 * (y_nodes[j] + y_nodes[j - 1]) };
            let hi = if j + 1 == ny {
                y_nodes[j]
            } else {
                0.5 * (y_nodes[j] + y_nodes[j + 1])
            };
            cell_widths[j] = hi - lo;
        }
        Grid2D {
            nx,
            ny,
            lx,
            y_max: y_nodes[ny - 1],
            stretch,
            y_nodes,
            cell_widths,
        }
    }

    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        Self::new(spec.nx, spec.ny, spec.lx, spec.y_max, spec.stretch)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
    pub fn stretch(&self) -> f64 {
        self.stretch
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }
    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }
    pub fn y(&self, j: usize) -> f64 {
        self.y_nodes[j]
    }
    pub fn cell_widths(&self) -> &[f64] {
        &self.cell_widths
    }
    pub fn dy_min(&self) -> f64 {
        self.y_nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
    pub fn dy_max(&self) -> f64 {
        self.y_nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
    /// Fundamental wavenumber `2 pi / Lx`.
    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lx
    }

    /// Check the layer-resolution requirement `dy_min <= epsilon / 4`.
    pub fn check_resolves_layer(&self, epsilon: f64) -> Result<()> {
        if self.dy_min() > epsilon / 4.0 * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "wall spacing {:e} does not resolve a layer of width {epsilon} (need <= eps/4)",
                self.dy_min()
            )));
        }
        Ok(())
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            nx: self.nx,
            ny: self.ny,
            lx: self.lx,
            y_max: self.y_max,
            stretch: self.stretch,
        }
    }
}

/// JSON description of a boundary-layer grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BLGridSpec {
    pub nz: usize,
    pub z_max: f64,
    /// Linear share of the algebraic map `z = z_max (c s + (1 - c) s^2)`.
    pub linear_share: f64,
}

impl Default for BLGridSpec {
    fn default() -> Self {
        BLGridSpec {
            nz: 192,
            z_max: 12.0,
            linear_share: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BLGrid {
    nx: usize,
    nz: usize,
    lx: f64,
    z_max: f64,
    z_nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl BLGrid {
    pub fn new(nx: usize, nz: usize, lx: f64, z_max: f64, linear_share: f64) -> Result<Self> {
        if z_max < 10.0 {
            return Err(Error::Config(format!("z_max = {z_max} must be at least 10")));
        }
        if nx < 4 || nz < 8 {
            return Err(Error::Config("boundary-layer grid needs nx >= 4, nz >= 8".into()));
        }
        if !(linear_share > 0.0 && linear_share <= 1.0) {
            return Err(Error::Config("linear_share must lie in (0, 1]".into()));
        }
        let z_nodes: Vec<f64> = (0..nz)
            .map(|k| {
                let s = k as f64 / (nz - 1) as f64;
                if k + 1 == nz {
                    z_max
                } else {
                    z_max * (linear_share * s + (1.0 - linear_share) * s * s)
                }
            })
            .collect();
        Self::from_z_nodes(nx, lx, z_nodes)
    }

    pub fn from_spec(nx: usize, lx: f64, spec: &BLGridSpec) -> Result<Self> {
        Self::new(nx, spec.nz, lx, spec.z_max, spec.linear_share)
    }

    pub fn from_z_nodes(nx: usize, lx: f64, z_nodes: Vec<f64>) -> Result<Self> {
        if z_nodes.first() != Some(&0.0) || z_nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("z nodes must start at 0 and increase".into()));
        }
        let nz = z_nodes.len();
        let mut weights = vec![0.0; nz];
        for k in 0..nz - 1 {
            let h = z_nodes[k + 1] - z_nodes[k];
            weights[k] += 0.5 * h;
            weights[k + 1] += 0.5 * h;
        }
        Ok(BLGrid {
            nx,
            nz,
            lx,
            z_max: z_nodes[nz - 1],
            z_nodes,
            weights,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn nz(&self) -> usize {
        self.nz
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn z_max(&self) -> f64 {
        self.z_max
    }
    pub fn z_nodes(&self) -> &[f64] {
        &self.z_nodes
    }
    /// Trapezoid quadrature weights on the z nodes.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn dz_min(&self) -> f64 {
        self.z_nodes[1] - self.z_nodes[0]
    }
}
