//! Vertex-centred finite-volume convection operator shared by the Euler
//! and Navier-Stokes solvers.
//!
//! Unknowns live at grid nodes; node `j` owns the dual cell bounded by the
//! midpoints to its neighbours (half cells at `y = 0` and `y = y_max`).
//! Faces carry HLL fluxes of linearly reconstructed conservative variables.

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{Field2D, State};
use crate::grid::Grid2D;
use crate::params::SimParams;
use crate::stencil::DiffMatrix;

/// Conservative variables `(rho, rho u, rho v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cons {
    pub rho: Array2<f64>,
    pub m: Array2<f64>,
    pub n: Array2<f64>,
}

impl Cons {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Cons {
            rho: Array2::zeros((nx, ny)),
            m: Array2::zeros((nx, ny)),
            n: Array2::zeros((nx, ny)),
        }
    }

    pub fn from_state(s: &State) -> Self {
        Cons {
            rho: s.rho.values().clone(),
            m: s.rho.values() * s.u.values(),
            n: s.rho.values() * s.v.values(),
        }
    }

    pub fn to_state(&self, grid: &Arc<Grid2D>, t: f64) -> Result<State> {
        Ok(State {
            rho: Field2D::from_array(grid, self.rho.clone())?,
            u: Field2D::from_array(grid, &self.m / &self.rho)?,
            v: Field2D::from_array(grid, &self.n / &self.rho)?,
            t,
        })
    }

    /// `self = a * self + b * (x + c * y)`.
    pub fn combine(&mut self, a: f64, b: f64, x: &Cons, c: f64, y: &Cons) {
        for (s, (xv, yv)) in [
            (&mut self.rho, (&x.rho, &y.rho)),
            (&mut self.m, (&x.m, &y.m)),
            (&mut self.n, (&x.n, &y.n)),
        ] {
            ndarray::Zip::from(s)
                .and(xv)
                .and(yv)
                .for_each(|s, &xv, &yv| *s = a * *s + b * (xv + c * yv));
        }
    }
}

/// Manufactured source in conservative form, `(t, x, y) -> [S_rho, S_m, S_n]`.
pub type Source<'a> = &'a (dyn Fn(f64, f64, f64) -> [f64; 3] + Sync);

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

#[inline]
fn flux_x(r: f64, m: f64, n: f64, params: &SimParams) -> ([f64; 3], f64, f64) {
    let u = m / r;
    let c = params.sound_speed_sq(r).sqrt();
    ([m, m * u + params.pressure(r), n * u], u - c, u + c)
}

#[inline]
fn flux_y(r: f64, m: f64, n: f64, params: &SimParams) -> ([f64; 3], f64, f64) {
    let v = n / r;
    let c = params.sound_speed_sq(r).sqrt();
    ([n, m * v, n * v + params.pressure(r)], v - c, v + c)
}

#[inline]
fn hll(
    ul: [f64; 3],
    ur: [f64; 3],
    flux: impl Fn(f64, f64, f64) -> ([f64; 3], f64, f64),
) -> [f64; 3] {
    let (fl, sl_l, sr_l) = flux(ul[0], ul[1], ul[2]);
    let (fr, sl_r, sr_r) = flux(ur[0], ur[1], ur[2]);
    let sl = sl_l.min(sl_r);
    let sr = sr_l.max(sr_r);
    if sl >= 0.0 {
        fl
    } else if sr <= 0.0 {
        fr
    } else {
        let inv = 1.0 / (sr - sl);
        [
            (sr * fl[0] - sl * fr[0] + sl * sr * (ur[0] - ul[0])) * inv,
            (sr * fl[1] - sl * fr[1] + sl * sr * (ur[1] - ul[1])) * inv,
            (sr * fl[2] - sl * fr[2] + sl * sr * (ur[2] - ul[2])) * inv,
        ]
    }
}

/// Which wall condition the node rows at `y = 0` and `y = y_max` obey.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallKind {
    /// `v = 0` at the wall (Euler).
    Slip,
    /// `u = v = 0` at the wall (Navier-Stokes).
    NoSlip,
}

/// Convection operator on a fixed grid.
#[derive(Clone, Debug)]
pub struct FvOperator {
    grid: Arc<Grid2D>,
    params: SimParams,
    dy: DiffMatrix,
    /// `y_{j+1/2} - y_j`, equal to `y_{j+1} - y_{j+1/2}` for midpoint faces.
    half: Vec<f64>,
}

impl FvOperator {
    pub fn new(grid: &Arc<Grid2D>, params: &SimParams) -> Self {
        let y = grid.y_nodes();
        let half: Vec<f64> = y.windows(2).map(|w| 0.5 * (w[1] - w[0])).collect();
        FvOperator {
            grid: Arc::clone(grid),
            params: params.clone(),
            dy: DiffMatrix::new(y, 1, 3),
            half,
        }
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    /// Node slopes along `y` for one column of a conservative variable.
    fn y_slopes(&self, col: &[f64], out: &mut [f64]) {
        let ny = col.len();
        if self.params.limiter {
            let y = self.grid.y_nodes();
            for j in 0..ny {
                let up = if j + 1 < ny {
                    (col[j + 1] - col[j]) / (y[j + 1] - y[j])
                } else {
                    (col[j] - col[j - 1]) / (y[j] - y[j - 1])
                };
                let dn = if j > 0 {
                    (col[j] - col[j - 1]) / (y[j] - y[j - 1])
                } else {
                    up
                };
                out[j] = minmod(up, dn);
            }
        } else {
            for (j, o) in out.iter_mut().enumerate() {
                let (s, w) = self.dy.row(j);
                *o = w[0] * col[s] + w[1] * col[s + 1] + w[2] * col[s + 2];
            }
        }
    }

    /// Time derivative `-div F(U) + S` into `out`.
    pub fn rhs(&self, u: &Cons, t: f64, source: Option<Source>, out: &mut Cons) {
        let nx = self.grid.nx();
        let ny = self.grid.ny();
        let dx = self.grid.dx();
        let w = self.grid.cell_widths();
        let p = &self.params;
        let lim = p.limiter;

        out.rho.fill(0.0);
        out.m.fill(0.0);
        out.n.fill(0.0);

        // x faces: face i carries the flux between nodes i and i+1
        let vars = [&u.rho, &u.m, &u.n];
        let mut slope = vec![[0.0; 3]; nx];
        for j in 0..ny {
            for i in 0..nx {
                let ip = (i + 1) % nx;
                let im = (i + nx - 1) % nx;
                for (k, q) in vars.iter().enumerate() {
                    let (a, b, c) = (q[(im, j)], q[(i, j)], q[(ip, j)]);
                    slope[i][k] = if lim { minmod(b - a, c - b) } else { 0.5 * (c - a) };
                }
            }
            for i in 0..nx {
                let ip = (i + 1) % nx;
                let mut ql = [0.0; 3];
                let mut qr = [0.0; 3];
                for (k, q) in vars.iter().enumerate() {
                    ql[k] = q[(i, j)] + 0.5 * slope[i][k];
                    qr[k] = q[(ip, j)] - 0.5 * slope[ip][k];
                }
                let f = hll(ql, qr, |r, m, n| flux_x(r, m, n, p));
                out.rho[(i, j)] -= f[0] / dx;
                out.m[(i, j)] -= f[1] / dx;
                out.n[(i, j)] -= f[2] / dx;
                out.rho[(ip, j)] += f[0] / dx;
                out.m[(ip, j)] += f[1] / dx;
                out.n[(ip, j)] += f[2] / dx;
            }
        }

        // y faces
        let mut col = vec![vec![0.0; ny]; 3];
        let mut sl = vec![vec![0.0; ny]; 3];
        for i in 0..nx {
            for (k, q) in vars.iter().enumerate() {
                for j in 0..ny {
                    col[k][j] = q[(i, j)];
                }
                self.y_slopes(&col[k], &mut sl[k]);
            }
            for j in 0..ny - 1 {
                let mut ql = [0.0; 3];
                let mut qr = [0.0; 3];
                for k in 0..3 {
                    ql[k] = col[k][j] + self.half[j] * sl[k][j];
                    qr[k] = col[k][j + 1] - self.half[j] * sl[k][j + 1];
                }
                let g = hll(ql, qr, |r, m, n| flux_y(r, m, n, p));
                out.rho[(i, j)] -= g[0] / w[j];
                out.m[(i, j)] -= g[1] / w[j];
                out.n[(i, j)] -= g[2] / w[j];
                out.rho[(i, j + 1)] += g[0] / w[j + 1];
                out.m[(i, j + 1)] += g[1] / w[j + 1];
                out.n[(i, j + 1)] += g[2] / w[j + 1];
            }
            // impermeable faces at y = 0 and y = y_max carry pressure only
            out.n[(i, 0)] += p.pressure(col[0][0]) / w[0];
            out.n[(i, ny - 1)] -= p.pressure(col[0][ny - 1]) / w[ny - 1];
        }

        if let Some(src) = source {
            for i in 0..nx {
                let x = self.grid.x(i);
                for j in 0..ny {
                    let s = src(t, x, self.grid.y(j));
                    out.rho[(i, j)] += s[0];
                    out.m[(i, j)] += s[1];
                    out.n[(i, j)] += s[2];
                }
            }
        }
    }

    /// Impose the wall rows: `n = 0` at both walls, and `m = 0` at `y = 0` for no-slip.
    pub fn apply_walls(&self, u: &mut Cons, kind: WallKind) {
        let ny = self.grid.ny();
        u.n.column_mut(0).fill(0.0);
        u.n.column_mut(ny - 1).fill(0.0);
        if kind == WallKind::NoSlip {
            u.m.column_mut(0).fill(0.0);
        }
    }

    /// Largest stable step for Courant number `cfl`.
    pub fn cfl_limit(&self, u: &Cons) -> f64 {
        let h = self.grid.dx().min(self.grid.dy_min());
        let mut speed = 0.0_f64;
        for ((r, m), n) in u.rho.iter().zip(u.m.iter()).zip(u.n.iter()) {
            let c = self.params.sound_speed_sq(r.max(0.0)).sqrt();
            speed = speed.max((m / r).abs() + (n / r).abs() + c);
        }
        self.params.cfl * h / speed
    }

    /// One SSP-RK2 step of the convection operator.
    pub fn rk2_step(
        &self,
        u: &Cons,
        t: f64,
        dt: f64,
        kind: WallKind,
        source: Option<Source>,
        scratch: &mut [Cons; 2],
    ) -> Cons {
        let [k, stage] = scratch;
        self.rhs(u, t, source, k);
        stage.clone_from(u);
        stage.combine(0.0, 1.0, u, dt, k);
        self.apply_walls(stage, kind);
        self.rhs(stage, t + dt, source, k);
        let mut next = u.clone();
        next.combine(0.5, 0.5, stage, dt, k);
        self.apply_walls(&mut next, kind);
        next
    }
}

/// Largest velocity-gradient magnitude, by one-sided differences.
pub fn max_velocity_gradient(s: &Cons, grid: &Grid2D) -> f64 {
    let (nx, ny) = s.rho.dim();
    let dx = grid.dx();
    let y = grid.y_nodes();
    let mut g = 0.0_f64;
    for i in 0..nx {
        let ip = (i + 1) % nx;
        for j in 0..ny {
            let u = s.m[(i, j)] / s.rho[(i, j)];
            let v = s.n[(i, j)] / s.rho[(i, j)];
            let ux = (s.m[(ip, j)] / s.rho[(ip, j)] - u) / dx;
            let vx = (s.n[(ip, j)] / s.rho[(ip, j)] - v) / dx;
            g = g.max(ux.abs()).max(vx.abs());
            if j + 1 < ny {
                let h = y[j + 1] - y[j];
                let uy = (s.m[(i, j + 1)] / s.rho[(i, j + 1)] - u) / h;
                let vy = (s.n[(i, j + 1)] / s.rho[(i, j + 1)] - v) / h;
                g = g.max(uy.abs()).max(vy.abs());
            }
        }
    }
    g
}

/// Abort on non-finite values, density below `floor`, or blow-up.
pub fn check_cons(s: &Cons, grid: &Grid2D, floor: f64, blowup: f64, t: f64) -> Result<()> {
    for (name, a) in [("rho", &s.rho), ("rho u", &s.m), ("rho v", &s.n)] {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: name, t });
        }
    }
    for ((i, j), &r) in s.rho.indexed_iter() {
        if !(r >= floor) {
            return Err(Error::DensityFloor {
                i,
                j,
                value: r,
                floor,
                t,
            });
        }
    }
    let g = max_velocity_gradient(s, grid);
    if g > blowup {
        return Err(Error::BlowUp { t, grad: g });
    }
    Ok(())
}
