//! Boundary-layer equations in the fast variable `z = y / eps`.
//!
//! The leading-order layer `u_p0` solves
//!
//! ```text
//! d_t u + (U + u) d_x u + u d_x U + W d_z u = (nu / R) d_zz u,
//! W = z d_y V + v_p - v_p(z = 0),   R v_p = int_z^inf d_x(R u) dz',
//! u(z = 0) = -U,   u(z = inf) = 0,
//! ```
//!
//! with `U, R, d_y V` the wall traces of the outer flow. The first-order
//! layer `u_p1` solves the linearization of the same operator forced by the
//! outer corrector and by the Taylor expansion of the outer flow across the
//! layer. All runs start from a zero layer.
//!
//! Time stepping is Heun's predictor-corrector for the explicit terms with
//! Crank-Nicolson diffusion in `z`.

mod ops;

use std::sync::Arc;

use ndarray::{Array2, Zip};

pub use ops::BLOps;

use crate::error::{Error, Result};
use crate::euler::{TraceSlice, WallTraces};
use crate::field::BLField;
use crate::grid::{BLGrid, BLGridSpec};
use crate::params::SimParams;
use crate::stencil::fornberg;
use crate::timegrid;

/// Largest tolerated `|f|` near `z_max` relative to `max |f|`.
pub const TAIL_TOL: f64 = 1e-8;

/// Manufactured source `S(t, x, z)` added to the layer equation.
pub type BLSource<'a> = &'a (dyn Fn(f64, f64, f64) -> f64 + Sync);

/// Boundary-layer fields on the stored time levels.
#[derive(Clone, Debug, PartialEq)]
pub struct PrandtlSolution {
    pub times: Vec<f64>,
    pub up0: Vec<BLField>,
    pub vp1: Vec<BLField>,
    /// `v_p1(x, 0)` per level, shape `(nt, nx)`.
    pub vp1_wall: Array2<f64>,
    pub up1: Option<Vec<BLField>>,
    pub vp2: Option<Vec<BLField>>,
    /// Wall value of `v_p2` from its closed formula, shape `(nt, nx)`.
    pub vp2_wall: Option<Array2<f64>>,
    pub rho_p2: Option<Vec<BLField>>,
    /// Spacing of the stored levels.
    pub dt: f64,
}

impl PrandtlSolution {
    pub fn grid(&self) -> &Arc<BLGrid> {
        self.up0[0].grid()
    }
}

fn diffusivity(s: &TraceSlice, p: &SimParams) -> Vec<f64> {
    s.rho.iter().map(|r| p.nu / r).collect()
}

fn source_array(ops: &BLOps, src: Option<BLSource>, t: f64) -> Option<Array2<f64>> {
    let g = &ops.grid;
    let dx = g.dx();
    let z = g.z_nodes();
    src.map(|f| Array2::from_shape_fn((g.nx(), g.nz()), |(i, k)| f(t, i as f64 * dx, z[k])))
}

/// One predictor-corrector step:
/// `u* = u + dt/2 (D_n u + D_{n+1} u*) + dt E(u, 0)` then the same with
/// `dt/2 (E(u, 0) + E(u*, 1))`. `explicit(v, stage)` evaluates `E` at
/// `t` (stage 0) or `t + dt` (stage 1).
fn heun_cn(
    ops: &BLOps,
    u: &Array2<f64>,
    dt: f64,
    diff: [&[f64]; 2],
    wall: &[f64],
    mut explicit: impl FnMut(&Array2<f64>, usize) -> Result<Array2<f64>>,
) -> Result<Array2<f64>> {
    let base = u + &(ops.diffuse(u, diff[0]) * (0.5 * dt));
    let e0 = explicit(u, 0)?;
    let mut pred = &base + &(&e0 * dt);
    ops.implicit_solve(&mut pred, 0.5 * dt, diff[1], wall)?;
    let e1 = explicit(&pred, 1)?;
    let mut next = base;
    Zip::from(&mut next)
        .and(&e0)
        .and(&e1)
        .for_each(|n, a, b| *n += 0.5 * dt * (a + b));
    ops.implicit_solve(&mut next, 0.5 * dt, diff[1], wall)?;
    Ok(next)
}

/// Explicit part of the leading-order operator at one time.
fn explicit0(ops: &BLOps, u: &Array2<f64>, s: &TraceSlice) -> Array2<f64> {
    let ux = ops.dx(u);
    let uz = ops.dz(u);
    let vp = ops.normal_velocity(u, &s.rho);
    let z = ops.grid.z_nodes();
    Array2::from_shape_fn(u.dim(), |(i, k)| {
        let w = z[k] * s.dvdy[i] + vp[(i, k)] - vp[(i, 0)];
        -((s.u[i] + u[(i, k)]) * ux[(i, k)] + u[(i, k)] * s.dxu[i] + w * uz[(i, k)])
    })
}

fn check_layer(f: &Array2<f64>, ops: &BLOps, field: &'static str, t: f64) -> Result<()> {
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { field, t });
    }
    let ratio = ops.tail_ratio(f);
    if ratio > TAIL_TOL {
        return Err(Error::TailNotConverged { ratio, t });
    }
    Ok(())
}

/// Stable explicit step for the advective terms of a layer `u` at time `t`.
fn advective_limit(ops: &BLOps, u: &Array2<f64>, s: &TraceSlice, cfl: f64) -> f64 {
    let g = &ops.grid;
    let z = g.z_nodes();
    let vp = ops.normal_velocity(u, &s.rho);
    let mut rate = 0.0_f64;
    for i in 0..g.nx() {
        for k in 0..g.nz() {
            let ax = (s.u[i] + u[(i, k)]).abs() / g.dx();
            let h = if k + 1 < g.nz() { z[k + 1] - z[k] } else { z[k] - z[k - 1] };
            let w = (z[k] * s.dvdy[i] + vp[(i, k)] - vp[(i, 0)]).abs() / h;
            rate = rate.max(ax + w);
        }
    }
    if rate == 0.0 {
        f64::INFINITY
    } else {
        cfl / rate
    }
}

/// `(1/R) int_z^inf d_x(R u) dz'` and its wall value.
pub fn recover_vp(up: &BLField, traces: &WallTraces, t: f64) -> Result<(BLField, Vec<f64>)> {
    let s = traces.at(t)?;
    recover_vp_with(up, &s.rho)
}

/// [`recover_vp`] for a given density trace.
pub fn recover_vp_with(up: &BLField, rho: &[f64]) -> Result<(BLField, Vec<f64>)> {
    let ops = BLOps::new(up.grid());
    if rho.len() != ops.grid.nx() {
        return Err(Error::Domain("density trace length differs from layer nx".into()));
    }
    let v = ops.normal_velocity(up.values(), rho);
    let wall = v.column(0).to_vec();
    Ok((BLField::from_array(up.grid(), v)?, wall))
}

/// Advance the leading-order layer from `t` to `t + dt`.
pub fn step_prandtl(
    up: &BLField,
    traces: &WallTraces,
    t: f64,
    dt: f64,
    params: &SimParams,
) -> Result<BLField> {
    step_prandtl_with_source(up, traces, t, dt, params, None)
}

pub fn step_prandtl_with_source(
    up: &BLField,
    traces: &WallTraces,
    t: f64,
    dt: f64,
    params: &SimParams,
    source: Option<BLSource>,
) -> Result<BLField> {
    let ops = BLOps::new(up.grid());
    check_nx(&ops, traces)?;
    let next = step0(&ops, up.values(), traces, t, dt, params, source)?;
    BLField::from_array(up.grid(), next)
}

fn step0(
    ops: &BLOps,
    u: &Array2<f64>,
    traces: &WallTraces,
    t: f64,
    dt: f64,
    params: &SimParams,
    source: Option<BLSource>,
) -> Result<Array2<f64>> {
    let s = [traces.at(t)?, traces.at(t + dt)?];
    let src = [source_array(ops, source, t), source_array(ops, source, t + dt)];
    let d = [diffusivity(&s[0], params), diffusivity(&s[1], params)];
    let wall: Vec<f64> = s[1].u.iter().map(|v| -v).collect();
    let next = heun_cn(ops, u, dt, [&d[0], &d[1]], &wall, |v, stage| {
        let mut e = explicit0(ops, v, &s[stage]);
        if let Some(a) = &src[stage] {
            e += a;
        }
        Ok(e)
    })?;
    check_layer(&next, ops, "u_p0", t + dt)?;
    Ok(next)
}

fn check_nx(ops: &BLOps, traces: &WallTraces) -> Result<()> {
    if traces.nx() != ops.grid.nx() {
        return Err(Error::Domain(format!(
            "traces carry {} x nodes, layer grid has {}",
            traces.nx(),
            ops.grid.nx()
        )));
    }
    Ok(())
}

/// Stored levels of `traces` up to `t_final`, which must itself be stored.
fn levels(traces: &WallTraces, t_final: f64) -> Result<Vec<f64>> {
    let ts = &traces.times;
    let tol = 1e-9 * t_final.abs().max(1.0);
    let end = ts
        .iter()
        .position(|&t| (t - t_final).abs() <= tol)
        .ok_or_else(|| Error::TimeGrid(format!("horizon {t_final} is not a stored trace level")))?;
    Ok(ts[..=end].to_vec())
}

/// Leading-order layer on the default boundary-layer grid.
pub fn solve_prandtl(traces: &WallTraces, t_final: f64, params: &SimParams) -> Result<PrandtlSolution> {
    let grid = Arc::new(BLGrid::from_spec(traces.nx(), traces.lx, &BLGridSpec::default())?);
    solve_prandtl_on(&grid, traces, t_final, params, None)
}

/// Leading-order layer on `grid`, optionally with a manufactured source.
pub fn solve_prandtl_on(
    grid: &Arc<BLGrid>,
    traces: &WallTraces,
    t_final: f64,
    params: &SimParams,
    source: Option<BLSource>,
) -> Result<PrandtlSolution> {
    params.validate()?;
    let ops = BLOps::new(grid);
    check_nx(&ops, traces)?;
    let times = levels(traces, t_final)?;
    let mut u = Array2::zeros((grid.nx(), grid.nz()));
    let mut up0 = Vec::with_capacity(times.len());
    let mut vp1 = Vec::with_capacity(times.len());
    let mut vp1_wall = Array2::zeros((times.len(), grid.nx()));
    let mut store = |n: usize, u: &Array2<f64>, rho: &[f64]| -> Result<()> {
        let v = ops.normal_velocity(u, rho);
        vp1_wall.row_mut(n).assign(&v.column(0));
        up0.push(BLField::from_array(grid, u.clone())?);
        vp1.push(BLField::from_array(grid, v)?);
        Ok(())
    };
    store(0, &u, &traces.at(times[0])?.rho)?;
    for n in 1..times.len() {
        let (t0, t1) = (times[n - 1], times[n]);
        let s = traces.at(t0)?;
        let nsub = ((t1 - t0) / advective_limit(&ops, &u, &s, params.cfl)).ceil().max(1.0) as usize;
        let dt = (t1 - t0) / nsub as f64;
        for m in 0..nsub {
            let t = t0 + m as f64 * dt;
            u = step0(&ops, &u, traces, t, dt, params, source)?;
        }
        store(n, &u, &traces.at(t1)?.rho)?;
    }
    let dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    Ok(PrandtlSolution {
        times,
        up0,
        vp1,
        vp1_wall,
        up1: None,
        vp2: None,
        vp2_wall: None,
        rho_p2: None,
        dt,
    })
}

/// Leading-order fields needed by the first-order operator at one time.
struct Background {
    u0: Array2<f64>,
    u0x: Array2<f64>,
    u0z: Array2<f64>,
    u0zz: Array2<f64>,
    vp1: Array2<f64>,
    w0: Array2<f64>,
    s: TraceSlice,
}

fn interp_levels(fields: &[BLField], times: &[f64], t: f64) -> Result<Array2<f64>> {
    let (k, th) = timegrid::locate(times, t)?;
    if th == 0.0 {
        return Ok(fields[k].values().clone());
    }
    Ok(fields[k].values() * (1.0 - th) + fields[k + 1].values() * th)
}

impl Background {
    fn at(ops: &BLOps, sol0: &PrandtlSolution, traces: &WallTraces, t: f64) -> Result<Self> {
        let s = traces.at(t)?;
        if s.corrector.is_none() {
            return Err(Error::MissingCorrectorTraces);
        }
        let u0 = interp_levels(&sol0.up0, &sol0.times, t)?;
        let vp1 = interp_levels(&sol0.vp1, &sol0.times, t)?;
        let z = ops.grid.z_nodes();
        let w0 = Array2::from_shape_fn(u0.dim(), |(i, k)| z[k] * s.dvdy[i] + vp1[(i, k)] - vp1[(i, 0)]);
        Ok(Background {
            u0x: ops.dx(&u0),
            u0z: ops.dz(&u0),
            u0zz: ops.dzz(&u0),
            u0,
            vp1,
            w0,
            s,
        })
    }

    /// `R v_p2 = -R1 v_p1 + int_z^inf d_x(R1 u0 + R u1) dz'`.
    fn vp2(&self, ops: &BLOps, u1: &Array2<f64>) -> Array2<f64> {
        let c = self.s.corrector.as_ref().expect("checked in Background::at");
        let s = &self.s;
        let flux = Array2::from_shape_fn(u1.dim(), |(i, k)| c.rho1[i] * self.u0[(i, k)] + s.rho[i] * u1[(i, k)]);
        let mut v = ops.integral_from_top(&ops.dx(&flux));
        Zip::indexed(&mut v).for_each(|(i, k), x| *x = (*x - c.rho1[i] * self.vp1[(i, k)]) / s.rho[i]);
        v
    }

    /// Closed-form wall value
    /// `(int_0^inf d_x(R1 u0 + R u1) dz - R1 v_p1(0)) / R`.
    fn vp2_wall(&self, ops: &BLOps, u1: &Array2<f64>) -> Vec<f64> {
        let c = self.s.corrector.as_ref().expect("checked in Background::at");
        let s = &self.s;
        let flux = Array2::from_shape_fn(u1.dim(), |(i, k)| c.rho1[i] * self.u0[(i, k)] + s.rho[i] * u1[(i, k)]);
        let total = ops.integral_from_top(&ops.dx(&flux));
        (0..u1.nrows())
            .map(|i| (total[(i, 0)] - c.rho1[i] * self.vp1[(i, 0)]) / s.rho[i])
            .collect()
    }

    fn explicit1(&self, ops: &BLOps, u1: &Array2<f64>, nu: f64) -> Array2<f64> {
        let c = self.s.corrector.as_ref().expect("checked in Background::at");
        let s = &self.s;
        let z = ops.grid.z_nodes();
        let u1x = ops.dx(u1);
        let u1z = ops.dz(u1);
        let vp2 = self.vp2(ops, u1);
        Array2::from_shape_fn(u1.dim(), |(i, k)| {
            let (u0, u0x, u0z) = (self.u0[(i, k)], self.u0x[(i, k)], self.u0z[(i, k)]);
            let v = u1[(i, k)];
            let zk = z[k];
            let transport = s.u[i] * u1x[(i, k)]
                + v * s.dxu[i]
                + v * u0x
                + u0 * u1x[(i, k)]
                + self.w0[(i, k)] * u1z[(i, k)];
            let forcing = (zk * s.dudy[i] + c.u1[i]) * u0x
                + u0 * (zk * s.dxdudy[i] + c.dxu1[i])
                + (0.5 * zk * zk * s.d2vdy2[i] + zk * c.dvdy1[i]) * u0z
                + self.vp1[(i, k)] * s.dudy[i]
                + (vp2[(i, k)] - vp2[(i, 0)]) * u0z
                + nu * c.rho1[i] / (s.rho[i] * s.rho[i]) * self.u0zz[(i, k)];
            -transport - forcing
        })
    }
}

/// First-order layer `(u_p1, v_p2)` on the levels of `sol0`, starting from
/// zero with wall value `-u1_bar`.
pub fn solve_prandtl_corrector(
    sol0: &PrandtlSolution,
    traces: &WallTraces,
    t_final: f64,
    params: &SimParams,
) -> Result<PrandtlSolution> {
    solve_prandtl_corrector_with_source(sol0, traces, t_final, params, None)
}

pub fn solve_prandtl_corrector_with_source(
    sol0: &PrandtlSolution,
    traces: &WallTraces,
    t_final: f64,
    params: &SimParams,
    source: Option<BLSource>,
) -> Result<PrandtlSolution> {
    params.validate()?;
    if traces.corrector.is_none() {
        return Err(Error::MissingCorrectorTraces);
    }
    let grid = sol0.grid();
    let ops = BLOps::new(grid);
    check_nx(&ops, traces)?;
    let tol = 1e-9 * t_final.abs().max(1.0);
    let end = sol0
        .times
        .iter()
        .position(|&t| (t - t_final).abs() <= tol)
        .ok_or_else(|| Error::TimeGrid(format!("horizon {t_final} is not a stored layer level")))?;
    let times = sol0.times[..=end].to_vec();
    let nx = grid.nx();
    let mut u1 = Array2::zeros((nx, grid.nz()));
    let mut up1 = Vec::with_capacity(times.len());
    let mut vp2 = Vec::with_capacity(times.len());
    let mut vp2_wall = Array2::zeros((times.len(), nx));
    let mut bg_prev = Background::at(&ops, sol0, traces, times[0])?;
    let mut store = |n: usize, u1: &Array2<f64>, bg: &Background| -> Result<()> {
        vp2_wall.row_mut(n).assign(&ndarray::Array1::from(bg.vp2_wall(&ops, u1)));
        up1.push(BLField::from_array(grid, u1.clone())?);
        vp2.push(BLField::from_array(grid, bg.vp2(&ops, u1))?);
        Ok(())
    };
    store(0, &u1, &bg_prev)?;
    for n in 1..times.len() {
        let (t0, t1) = (times[n - 1], times[n]);
        let nsub = ((t1 - t0) / advective_limit(&ops, &bg_prev.u0, &bg_prev.s, params.cfl))
            .ceil()
            .max(1.0) as usize;
        let dt = (t1 - t0) / nsub as f64;
        for m in 0..nsub {
            let t = t0 + m as f64 * dt;
            let b1 = Background::at(&ops, sol0, traces, t + dt)?;
            let b0 = &bg_prev;
            let b1r = &b1;
            let d = [diffusivity(&b0.s, params), diffusivity(&b1r.s, params)];
            let wall: Vec<f64> = b1r.s.corrector.as_ref().expect("checked").u1.iter().map(|v| -v).collect();
            let src = [source_array(&ops, source, t), source_array(&ops, source, t + dt)];
            u1 = heun_cn(&ops, &u1, dt, [&d[0], &d[1]], &wall, |v, stage| {
                let b = if stage == 0 { b0 } else { b1r };
                let mut e = b.explicit1(&ops, v, params.nu);
                if let Some(a) = &src[stage] {
                    e += a;
                }
                Ok(e)
            })?;
            check_layer(&u1, &ops, "u_p1", t + dt)?;
            bg_prev = b1;
        }
        store(n, &u1, &bg_prev)?;
    }
    Ok(PrandtlSolution {
        times: times.clone(),
        up0: sol0.up0[..times.len()].to_vec(),
        vp1: sol0.vp1[..times.len()].to_vec(),
        vp1_wall: sol0.vp1_wall.slice(ndarray::s![..times.len(), ..]).to_owned(),
        up1: Some(up1),
        vp2: Some(vp2),
        vp2_wall: Some(vp2_wall),
        rho_p2: sol0.rho_p2.clone(),
        dt: sol0.dt,
    })
}

/// `d_t` of the stored `v_p1` levels: centred in the interior, three-point
/// one-sided at the ends (two-point with only two levels).
fn time_derivative(fields: &[BLField], times: &[f64], n: usize) -> Array2<f64> {
    let nt = times.len();
    if nt == 1 {
        return Array2::zeros(fields[0].values().dim());
    }
    let idx: Vec<usize> = if nt == 2 {
        vec![0, 1]
    } else if n == 0 {
        vec![0, 1, 2]
    } else if n + 1 == nt {
        vec![nt - 3, nt - 2, nt - 1]
    } else {
        vec![n - 1, n, n + 1]
    };
    let ts: Vec<f64> = idx.iter().map(|&j| times[j]).collect();
    let w = &fornberg(times[n], &ts, 1)[1];
    let mut out = Array2::zeros(fields[0].values().dim());
    for (c, &j) in w.iter().zip(&idx) {
        out.scaled_add(*c, fields[j].values());
    }
    out
}

/// `rho_p2 = (1 / h'(R)) int_z^inf P dz'` on every stored level, where `P`
/// collects the `O(eps)` layer part of the normal momentum equation.
pub fn compute_rho_p2(sol: &PrandtlSolution, traces: &WallTraces, params: &SimParams) -> Result<Vec<BLField>> {
    let grid = sol.grid();
    let ops = BLOps::new(grid);
    check_nx(&ops, traces)?;
    let z = grid.z_nodes();
    let visc = params.nu + params.sigma;
    let mut out = Vec::with_capacity(sol.times.len());
    for (n, &t) in sol.times.iter().enumerate() {
        let s = traces.at(t)?;
        let vp = sol.vp1[n].values();
        let u0 = sol.up0[n].values();
        let vt = time_derivative(&sol.vp1, &sol.times, n);
        let vx = ops.dx(vp);
        let vz = ops.dz(vp);
        let vzz = ops.dzz(vp);
        let u0xz = ops.dx(&ops.dz(u0));
        let (v1, dxv1): (Vec<f64>, Vec<f64>) = match &s.corrector {
            Some(c) => (c.v1.clone(), c.dxv1.clone()),
            None => (vp.column(0).mapv(|v| -v).to_vec(), vx.column(0).mapv(|v| -v).to_vec()),
        };
        let p = Array2::from_shape_fn(vp.dim(), |(i, k)| {
            let zk = z[k];
            let r = s.rho[i];
            vt[(i, k)]
                + s.u[i] * vx[(i, k)]
                + u0[(i, k)] * (zk * s.dxdvdy[i] + dxv1[i] + vx[(i, k)])
                + vp[(i, k)] * (s.dvdy[i] + vz[(i, k)])
                + (zk * s.dvdy[i] + v1[i]) * vz[(i, k)]
                - params.nu / r * vzz[(i, k)]
                - visc / r * (u0xz[(i, k)] + vzz[(i, k)])
        });
        let mut rho = ops.integral_from_top(&p);
        for (mut row, r) in rho.rows_mut().into_iter().zip(&s.rho) {
            let h = params.enthalpy_slope(*r);
            row.mapv_inplace(|v| v / h);
        }
        if rho.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: "rho_p2", t });
        }
        out.push(BLField::from_array(grid, rho)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(nx: usize) -> Arc<BLGrid> {
        Arc::new(BLGrid::new(nx, 96, 2.0 * PI, 12.0, 0.3).unwrap())
    }

    #[test]
    fn zero_traces_give_zero_layer() {
        let g = grid(8);
        let tr = WallTraces::rest(timegrid::uniform(4, 0.1), 8, 2.0 * PI);
        let sol = solve_prandtl_on(&g, &tr, 0.1, &SimParams::default(), None).unwrap();
        assert_eq!(sol.times.len(), 5);
        assert!(sol.up0.iter().all(|f| f.max_abs() == 0.0));
        assert!(sol.vp1.iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn zero_horizon_is_zero_field() {
        let tr = WallTraces::rest(vec![0.0], 8, 2.0 * PI);
        let sol = solve_prandtl(&tr, 0.0, &SimParams::default()).unwrap();
        assert_eq!(sol.up0.len(), 1);
        assert_eq!(sol.up0[0].max_abs(), 0.0);
        assert_eq!(sol.dt, 0.0);
    }

    #[test]
    fn x_independent_layer_has_no_normal_velocity() {
        let g = grid(8);
        let up = BLField::from_fn(&g, |_, z| (-z * z).exp());
        let (v, wall) = recover_vp_with(&up, &[1.3; 8]).unwrap();
        assert!(v.max_abs() < 1e-14);
        assert!(wall.iter().all(|w| w.abs() < 1e-14));
    }

    #[test]
    fn horizon_must_be_stored() {
        let tr = WallTraces::rest(timegrid::uniform(5, 0.1), 8, 2.0 * PI);
        assert!(matches!(
            solve_prandtl_on(&grid(8), &tr, 0.07, &SimParams::default(), None),
            Err(Error::TimeGrid(_))
        ));
    }

    #[test]
    fn corrector_needs_corrector_traces() {
        let g = grid(8);
        let tr = WallTraces::rest(timegrid::uniform(3, 0.1), 8, 2.0 * PI);
        let p = SimParams::default();
        let sol = solve_prandtl_on(&g, &tr, 0.1, &p, None).unwrap();
        assert!(matches!(
            solve_prandtl_corrector(&sol, &tr, 0.1, &p),
            Err(Error::MissingCorrectorTraces)
        ));
    }
}
