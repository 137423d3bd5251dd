//! Closed-form layer fixtures.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use statrs::function::erf::erfc;
use zerovisc::euler::WallTraces;
use zerovisc::prandtl::{recover_vp_with, solve_prandtl_on, BLOps};
use zerovisc::timegrid::uniform;
use zerovisc::{BLField, BLGrid, SimParams};

pub const LX: f64 = 2.0 * PI;

pub fn bl(nx: usize, nz: usize) -> Arc<BLGrid> {
    Arc::new(BLGrid::new(nx, nz, LX, 12.0, 0.3).unwrap())
}

/// `int_z^inf exp(-s^2) ds`.
pub fn gauss_tail(z: f64) -> f64 {
    0.5 * PI.sqrt() * erfc(z)
}

pub fn sample(times: &[f64], nx: usize, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
    let dx = LX / nx as f64;
    Array2::from_shape_fn((times.len(), nx), |(n, i)| f(times[n], i as f64 * dx))
}

/// Outer wall traces given in closed form.
pub struct Outer {
    pub u: fn(f64, f64) -> f64,
    pub rho: fn(f64, f64) -> f64,
    pub dvdy: fn(f64, f64) -> f64,
}

impl Outer {
    pub fn traces(&self, times: &[f64], nx: usize) -> WallTraces {
        let mut tr = WallTraces::rest(times.to_vec(), nx, LX);
        tr.u_bar = sample(times, nx, self.u);
        tr.rho_bar = sample(times, nx, self.rho);
        tr.dvdy_bar = sample(times, nx, self.dvdy);
        tr
    }
}

/// Grid-weighted L2 norm of a layer array.
pub fn l2(g: &BLGrid, a: &Array2<f64>) -> f64 {
    let w = g.weights();
    let mut s = 0.0;
    for row in a.rows() {
        for (v, wk) in row.iter().zip(w) {
            s += v * v * wk;
        }
    }
    (s * g.dx()).sqrt()
}

/// Closed-form pieces of the full-operator manufactured layer
/// `u = -U(t, x) exp(-z^2)`, `U = t sin x / 2`, `R = 1 + cos(x)/5`,
/// `d_y V = 3 cos(x) / 10`.
pub mod full {
    use super::*;

    pub const OUTER: Outer = Outer {
        u: |t, x| 0.5 * t * x.sin(),
        rho: |_, x| 1.0 + 0.2 * x.cos(),
        dvdy: |_, x| 0.3 * x.cos(),
    };

    pub fn exact(t: f64, x: f64, z: f64) -> f64 {
        -(OUTER.u)(t, x) * (-z * z).exp()
    }

    pub fn source(t: f64, x: f64, z: f64) -> f64 {
        let g = (-z * z).exp();
        let ub = 0.5 * t * x.sin();
        let ubx = 0.5 * t * x.cos();
        let ubt = 0.5 * x.sin();
        let r = 1.0 + 0.2 * x.cos();
        let rx = -0.2 * x.sin();
        let u = -ub * g;
        let ut = -ubt * g;
        let ux = -ubx * g;
        let uz = ub * 2.0 * z * g;
        let uzz = -ub * (4.0 * z * z - 2.0) * g;
        let flux = (rx * ub + r * ubx) / r;
        let w = z * 0.3 * x.cos() - flux * (gauss_tail(z) - gauss_tail(0.0));
        ut + (ub + u) * ux + u * ubx + w * uz - uzz / r
    }
}

/// L2 errors of the full-operator manufactured layer at T = 0.2 under joint
/// z / t refinement.
pub fn full_operator_errors() -> Vec<f64> {
    let t_final = 0.2;
    [(48, 10), (96, 20), (192, 40)]
        .iter()
        .map(|&(nz, nt)| {
            let g = bl(128, nz);
            let times = uniform(nt, t_final);
            let tr = full::OUTER.traces(&times, 128);
            let sol = solve_prandtl_on(&g, &tr, t_final, &SimParams::default(), Some(&full::source)).unwrap();
            let exact = BLField::from_fn(&g, |x, z| full::exact(t_final, x, z));
            l2(&g, &(sol.up0.last().unwrap().values() - exact.values()))
        })
        .collect()
}

/// `max |d_x(R u) + d_z(R v_p)|` with the solver's own stencils.
pub fn divergence_residual(nx: usize, nz: usize) -> f64 {
    let g = bl(nx, nz);
    let ops = BLOps::new(&g);
    let rho: Vec<f64> = (0..nx).map(|i| 1.0 + 0.2 * (i as f64 * g.dx()).cos()).collect();
    let up = BLField::from_fn(&g, |x, z| x.sin() * z * (-z * z).exp());
    let (v, _) = recover_vp_with(&up, &rho).unwrap();
    let ru = BLOps::scale_rows(up.values(), &rho);
    let rv = BLOps::scale_rows(v.values(), &rho);
    let res = ops.dx(&ru) + ops.dz(&rv);
    res.iter().fold(0.0, |m, r| m.max(r.abs()))
}

pub fn divergence_residuals() -> Vec<f64> {
    [(32, 49), (64, 97), (128, 193)]
        .iter()
        .map(|&(nx, nz)| divergence_residual(nx, nz))
        .collect()
}
