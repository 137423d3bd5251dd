//! Manufactured solutions with hand-derived derivatives.
#![allow(dead_code)]

pub mod checks;
pub mod layer;

use std::f64::consts::PI;
use std::sync::Arc;

use zerovisc::{Field2D, Grid2D, SimParams, State};

#[derive(Clone, Copy, Debug)]
pub enum Trig {
    Sin,
    Cos,
}

impl Trig {
    /// Value and first two derivatives of `trig(s)`.
    fn eval(self, s: f64) -> [f64; 3] {
        match self {
            Trig::Sin => [s.sin(), s.cos(), -s.sin()],
            Trig::Cos => [s.cos(), -s.sin(), -s.cos()],
        }
    }
}

/// `offset + amp * X(kx x - c t) * Y(ky y) * (1 + b t)`.
#[derive(Clone, Copy, Debug)]
pub struct Sep {
    pub offset: f64,
    pub amp: f64,
    pub kx: f64,
    pub c: f64,
    pub tx: Trig,
    pub ky: f64,
    pub ty: Trig,
    pub b: f64,
}

/// Value and partials `[f, f_t, f_x, f_y, f_xx, f_yy, f_xy]`.
pub type Jet = [f64; 7];

impl Sep {
    pub fn jet(&self, t: f64, x: f64, y: f64) -> Jet {
        let xs = self.tx.eval(self.kx * x - self.c * t);
        let ys = self.ty.eval(self.ky * y);
        let tt = 1.0 + self.b * t;
        let a = self.amp;
        [
            self.offset + a * xs[0] * ys[0] * tt,
            a * (-self.c * xs[1] * ys[0] * tt + xs[0] * ys[0] * self.b),
            a * self.kx * xs[1] * ys[0] * tt,
            a * self.ky * xs[0] * ys[1] * tt,
            a * self.kx * self.kx * xs[2] * ys[0] * tt,
            a * self.ky * self.ky * xs[0] * ys[2] * tt,
            a * self.kx * self.ky * xs[1] * ys[1] * tt,
        ]
    }
}

/// Smooth flow on `[0, 2 pi) x [0, y_max]` with `v = 0` at both walls,
/// `u = 0` at `y = 0` and `d_y u = d_y rho = 0` at `y = y_max`.
#[derive(Clone, Copy, Debug)]
pub struct Manufactured {
    pub rho: Sep,
    pub u: Sep,
    pub v: Sep,
}

impl Manufactured {
    pub fn new(y_max: f64) -> Self {
        let ky = PI / y_max;
        Manufactured {
            rho: Sep {
                offset: 1.0,
                amp: 0.1,
                kx: 1.0,
                c: 1.0,
                tx: Trig::Sin,
                ky,
                ty: Trig::Cos,
                b: 0.0,
            },
            u: Sep {
                offset: 0.0,
                amp: 0.1,
                kx: 1.0,
                c: 1.0,
                tx: Trig::Cos,
                ky: 0.5 * ky,
                ty: Trig::Sin,
                b: 0.5,
            },
            v: Sep {
                offset: 0.0,
                amp: 0.05,
                kx: 1.0,
                c: 0.0,
                tx: Trig::Sin,
                ky,
                ty: Trig::Sin,
                b: 1.0,
            },
        }
    }

    pub fn state(&self, grid: &Arc<Grid2D>, t: f64) -> State {
        State {
            rho: Field2D::from_fn(grid, |x, y| self.rho.jet(t, x, y)[0]),
            u: Field2D::from_fn(grid, |x, y| self.u.jet(t, x, y)[0]),
            v: Field2D::from_fn(grid, |x, y| self.v.jet(t, x, y)[0]),
            t,
        }
    }

    /// Conservative-form source making the fields an exact solution of
    /// the compressible system with shear/bulk viscosities `(mu, mu_b)`
    /// (zero for Euler).
    pub fn source(&self, p: &SimParams, mu: f64, mu_b: f64, t: f64, x: f64, y: f64) -> [f64; 3] {
        let r = self.rho.jet(t, x, y);
        let u = self.u.jet(t, x, y);
        let v = self.v.jet(t, x, y);
        let (rt, rx, ry) = (r[1], r[2], r[3]);
        let px = p.sound_speed_sq(r[0]) * rx;
        let py = p.sound_speed_sq(r[0]) * ry;
        let s_rho = rt + rx * u[0] + r[0] * u[2] + ry * v[0] + r[0] * v[3];
        let s_m = rt * u[0] + r[0] * u[1]
            + rx * u[0] * u[0] + 2.0 * r[0] * u[0] * u[2] + px
            + ry * u[0] * v[0] + r[0] * u[3] * v[0] + r[0] * u[0] * v[3]
            - mu * (u[4] + u[5]) - mu_b * (u[4] + v[6]);
        let s_n = rt * v[0] + r[0] * v[1]
            + rx * u[0] * v[0] + r[0] * u[2] * v[0] + r[0] * u[0] * v[2]
            + ry * v[0] * v[0] + 2.0 * r[0] * v[0] * v[3] + py
            - mu * (v[4] + v[5]) - mu_b * (u[6] + v[5]);
        [s_rho, s_m, s_n]
    }
}

/// `(L2 error of rho, u, v)` between a state and the manufactured fields.
pub fn errors(s: &State, m: &Manufactured) -> [f64; 3] {
    let g = s.grid();
    let ex = m.state(g, s.t);
    let d = s.diff(&ex);
    [d.rho.l2_norm(), d.u.l2_norm(), d.v.l2_norm()]
}

/// Observed order from errors on successively halved grids.
pub fn orders(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Root-sum-square of per-component errors.
pub fn combined(e: &[f64; 3]) -> f64 {
    (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt()
}
