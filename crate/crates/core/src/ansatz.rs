//! Composite approximate solution and its Navier-Stokes residual.
//!
//! ```text
//! rho_a = rho_e0 + eps rho_e1 + eps^2 rho_p2(y/eps)
//! u_a   = u_e0 + eps u_e1 + u_p0(y/eps) + eps u_p1(y/eps)
//! v_a   = v_e0 + eps v_e1 + eps v_p1(y/eps) + eps^2 (v_p2(y/eps) - v_p2(0))
//! ```
//!
//! Layer fields are interpolated onto the physical nodes with cubic splines
//! in `z` and taken as zero beyond `z_max`.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{extract_traces, solve_euler, solve_linearized_euler, EulerTrajectory};
use crate::field::{BLField, Field2D, State};
use crate::grid::{BLGrid, BLGridSpec, Grid2D};
use crate::linalg::CubicSpline;
use crate::params::SimParams;
use crate::prandtl::{
    compute_rho_p2, solve_prandtl_corrector, solve_prandtl_on, PrandtlSolution, TAIL_TOL,
};
use crate::stencil::{dx4, dxx4, fornberg, DiffMatrix};

/// Outer and layer pieces together with the composed states.
#[derive(Clone, Debug)]
pub struct AnsatzBundle {
    pub euler0: EulerTrajectory,
    pub euler1: EulerTrajectory,
    pub prandtl: PrandtlSolution,
    pub epsilon: f64,
    /// `(rho_a, u_a, v_a)` on every stored level.
    pub composed: Vec<State>,
    /// The leading-order pair `(rho_e0, u_e0 + u_p0, v_e0 + eps v_p1)`.
    pub leading: Vec<State>,
}

impl AnsatzBundle {
    pub fn grid(&self) -> &Arc<Grid2D> {
        self.composed[0].grid()
    }

    pub fn times(&self) -> Vec<f64> {
        self.composed.iter().map(|s| s.t).collect()
    }
}

/// Layer field sampled at `z = y_j / eps` for every physical node.
pub fn layer_on_grid(f: &BLField, grid: &Grid2D, eps: f64) -> Result<Array2<f64>> {
    let bg = f.grid();
    if bg.nx() != grid.nx() {
        return Err(Error::Domain(format!(
            "layer grid has {} x nodes, physical grid {}",
            bg.nx(),
            grid.nx()
        )));
    }
    let z = bg.z_nodes();
    let nz = z.len();
    let zmax = bg.z_max();
    let y = grid.y_nodes();
    let z_needed = grid.y_max() / eps;
    if z_needed > zmax {
        let tail = tail_ratio(f);
        if tail > TAIL_TOL {
            return Err(Error::BoundaryLayerTruncated {
                z_needed,
                z_max: zmax,
                tail,
            });
        }
    }
    let c0 = fornberg(0.0, &z[..5], 2)[2].clone();
    let c1 = fornberg(zmax, &z[nz - 5..], 2)[2].clone();
    let mut out = Array2::zeros((grid.nx(), grid.ny()));
    for (i, col) in f.values().rows().into_iter().enumerate() {
        let ys = col.to_vec();
        let s0: f64 = c0.iter().zip(&ys[..5]).map(|(c, v)| c * v).sum();
        let s1: f64 = c1.iter().zip(&ys[nz - 5..]).map(|(c, v)| c * v).sum();
        let sp = CubicSpline::with_end_curvature(z, &ys, s0, s1)?;
        let mut k = 0;
        for (j, &yj) in y.iter().enumerate() {
            let zj = yj / eps;
            if zj > zmax {
                break;
            }
            while k + 2 < nz && z[k + 1] < zj {
                k += 1;
            }
            out[(i, j)] = sp.eval_in(k, zj);
        }
    }
    Ok(out)
}

/// `max |f|` over `z >= 0.9 z_max` relative to `max |f|`.
fn tail_ratio(f: &BLField) -> f64 {
    let z = f.grid().z_nodes();
    let zc = 0.9 * f.grid().z_max();
    let m = f.max_abs();
    if m == 0.0 {
        return 0.0;
    }
    let mut t = 0.0_f64;
    for row in f.values().rows() {
        for (v, &zk) in row.iter().zip(z) {
            if zk >= zc {
                t = t.max(v.abs());
            }
        }
    }
    t / m
}

fn same_grid(a: &Grid2D, b: &Grid2D) -> bool {
    a.nx() == b.nx() && a.lx() == b.lx() && a.y_nodes() == b.y_nodes()
}

/// Compose the approximate solution on `grid`.
///
/// Absent first-order layer pieces (`up1`, `vp2`, `rho_p2`) count as zero.
pub fn assemble_ansatz(
    euler0: EulerTrajectory,
    euler1: EulerTrajectory,
    prandtl: PrandtlSolution,
    epsilon: f64,
    grid: &Arc<Grid2D>,
) -> Result<AnsatzBundle> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    if !same_grid(euler0.grid(), grid) || !same_grid(euler1.grid(), grid) {
        return Err(Error::Domain("outer trajectories must live on the composition grid".into()));
    }
    let nt = prandtl.times.len();
    if euler0.states.len() < nt || euler1.states.len() < nt {
        return Err(Error::TimeGrid("outer trajectories cover fewer levels than the layer".into()));
    }
    for (n, &t) in prandtl.times.iter().enumerate() {
        let tol = 1e-9 * t.abs().max(1.0);
        if (euler0.states[n].t - t).abs() > tol || (euler1.states[n].t - t).abs() > tol {
            return Err(Error::TimeGrid(format!("level {n}: outer and layer times differ")));
        }
    }
    let eps = epsilon;
    let e2 = eps * eps;
    let nx = grid.nx();
    let mut composed = Vec::with_capacity(nt);
    let mut leading = Vec::with_capacity(nt);
    for n in 0..nt {
        let s0 = &euler0.states[n];
        let s1 = &euler1.states[n];
        let up0 = layer_on_grid(&prandtl.up0[n], grid, eps)?;
        let vp1 = layer_on_grid(&prandtl.vp1[n], grid, eps)?;
        let opt = |f: &Option<Vec<BLField>>| -> Result<Option<Array2<f64>>> {
            f.as_ref().map(|v| layer_on_grid(&v[n], grid, eps)).transpose()
        };
        let up1 = opt(&prandtl.up1)?;
        let vp2 = opt(&prandtl.vp2)?;
        let rp2 = opt(&prandtl.rho_p2)?;
        let vp2_wall: Vec<f64> = match (&prandtl.vp2_wall, &vp2) {
            (Some(w), _) => w.row(n).to_vec(),
            (None, Some(v)) => v.column(0).to_vec(),
            (None, None) => vec![0.0; nx],
        };
        let mut rho = s0.rho.values() + &(s1.rho.values() * eps);
        let mut u = s0.u.values() + &(s1.u.values() * eps) + &up0;
        let mut v = s0.v.values() + &(s1.v.values() * eps) + &(&vp1 * eps);
        if let Some(a) = &rp2 {
            rho.scaled_add(e2, a);
        }
        if let Some(a) = &up1 {
            u.scaled_add(eps, a);
        }
        if let Some(a) = &vp2 {
            v.scaled_add(e2, a);
        }
        for (mut row, w) in v.rows_mut().into_iter().zip(&vp2_wall) {
            row.mapv_inplace(|x| x - e2 * w);
        }
        let t = prandtl.times[n];
        let state = State {
            rho: Field2D::from_array(grid, rho)?,
            u: Field2D::from_array(grid, u)?,
            v: Field2D::from_array(grid, v)?,
            t,
        };
        state.check_finite()?;
        let lead_u = s0.u.values() + &up0;
        let lead_v = s0.v.values() + &(&vp1 * eps);
        leading.push(State {
            rho: s0.rho.clone(),
            u: Field2D::from_array(grid, lead_u)?,
            v: Field2D::from_array(grid, lead_v)?,
            t,
        });
        composed.push(state);
    }
    Ok(AnsatzBundle {
        euler0,
        euler1,
        prandtl,
        epsilon,
        composed,
        leading,
    })
}

/// Run every expansion piece from `init` to `t_final` and compose at `eps`:
/// outer flow, its wall traces, leading-order layer, outer corrector
/// pumped by `-v_p1(x, 0)`, first-order layer and density correction.
pub fn construct_ansatz(
    init: &State,
    bl: &BLGridSpec,
    params: &SimParams,
    eps: f64,
    t_final: f64,
) -> Result<AnsatzBundle> {
    let grid = init.grid();
    let euler0 = solve_euler(init, t_final, params)?;
    let traces0 = extract_traces(&euler0, None)?;
    let bl_grid = Arc::new(BLGrid::from_spec(grid.nx(), grid.lx(), bl)?);
    let sol0 = solve_prandtl_on(&bl_grid, &traces0, t_final, params, None)?;
    let inflow = sol0.vp1_wall.mapv(|v| -v);
    let euler1 = solve_linearized_euler(&euler0, &inflow, t_final, params)?;
    let traces = extract_traces(&euler0, Some(&euler1))?;
    let mut sol = solve_prandtl_corrector(&sol0, &traces, t_final, params)?;
    sol.rho_p2 = Some(compute_rho_p2(&sol, &traces, params)?);
    assemble_ansatz(euler0, euler1, sol, eps, grid)
}

/// Residual triple at one time level.
#[derive(Clone, Debug)]
pub struct Residual {
    pub t: f64,
    pub r_rho: Field2D,
    pub r_u: Field2D,
    pub r_v: Field2D,
}

/// Stencils for evaluating the continuous operator on a grid.
struct Ops {
    dy: DiffMatrix,
    dyy: DiffMatrix,
    dx: f64,
}

impl Ops {
    fn new(g: &Grid2D) -> Self {
        Ops {
            dy: DiffMatrix::new(g.y_nodes(), 1, 5),
            dyy: DiffMatrix::new(g.y_nodes(), 2, 5),
            dx: g.dx(),
        }
    }
}

/// Spatial part of the Navier-Stokes operator at viscosity `eps^2`:
/// mass flux divergence and the non-conservative momentum terms divided
/// by `rho`.
fn spatial_operator(s: &State, p: &SimParams, eps: f64, ops: &Ops) -> [Array2<f64>; 3] {
    let (r, u, v) = (s.rho.values(), s.u.values(), s.v.values());
    let rx = dx4(r, ops.dx);
    let ry = ops.dy.apply_columns(r);
    let ux = dx4(u, ops.dx);
    let uy = ops.dy.apply_columns(u);
    let vx = dx4(v, ops.dx);
    let vy = ops.dy.apply_columns(v);
    let uxx = dxx4(u, ops.dx);
    let uyy = ops.dyy.apply_columns(u);
    let vxx = dxx4(v, ops.dx);
    let vyy = ops.dyy.apply_columns(v);
    let uxy = dx4(&uy, ops.dx);
    let vxy = dx4(&vy, ops.dx);
    let e2 = eps * eps;
    let (nu, bulk) = (p.nu, p.nu + p.sigma);
    let dim = r.dim();
    let mass = Array2::from_shape_fn(dim, |ij| {
        rx[ij] * u[ij] + r[ij] * ux[ij] + ry[ij] * v[ij] + r[ij] * vy[ij]
    });
    let mom_u = Array2::from_shape_fn(dim, |ij| {
        let h = p.enthalpy_slope(r[ij]);
        u[ij] * ux[ij] + v[ij] * uy[ij] + h * rx[ij]
            - e2 / r[ij] * (nu * (uxx[ij] + uyy[ij]) + bulk * (uxx[ij] + vxy[ij]))
    });
    let mom_v = Array2::from_shape_fn(dim, |ij| {
        let h = p.enthalpy_slope(r[ij]);
        u[ij] * vx[ij] + v[ij] * vy[ij] + h * ry[ij]
            - e2 / r[ij] * (nu * (vxx[ij] + vyy[ij]) + bulk * (uxy[ij] + vyy[ij]))
    });
    [mass, mom_u, mom_v]
}

/// Second-order time-derivative weights at level `n` of `times`.
fn time_weights(times: &[f64], n: usize) -> (Vec<usize>, Vec<f64>) {
    let nt = times.len();
    let idx: Vec<usize> = if n == 0 {
        vec![0, 1, 2]
    } else if n + 1 == nt {
        vec![nt - 3, nt - 2, nt - 1]
    } else {
        vec![n - 1, n, n + 1]
    };
    let ts: Vec<f64> = idx.iter().map(|&k| times[k]).collect();
    let w = fornberg(times[n], &ts, 1)[1].clone();
    (idx, w)
}

/// Navier-Stokes residual `R = -(d_t + spatial operator)` of a trajectory at
/// viscosity `eps^2`, on every stored level.
pub fn trajectory_residual(states: &[State], params: &SimParams, eps: f64) -> Result<Vec<Residual>> {
    if states.len() < 3 {
        return Err(Error::InsufficientLevels {
            needed: 3,
            got: states.len(),
        });
    }
    let grid = states[0].grid();
    let ops = Ops::new(grid);
    let times: Vec<f64> = states.iter().map(|s| s.t).collect();
    let mut out = Vec::with_capacity(states.len());
    for (n, s) in states.iter().enumerate() {
        let [mut m, mut a, mut b] = spatial_operator(s, params, eps, &ops);
        let (idx, w) = time_weights(&times, n);
        for (&k, &c) in idx.iter().zip(&w) {
            m.scaled_add(c, states[k].rho.values());
            a.scaled_add(c, states[k].u.values());
            b.scaled_add(c, states[k].v.values());
        }
        let neg = |x: Array2<f64>| Field2D::from_array(grid, x.mapv(|v| -v));
        out.push(Residual {
            t: s.t,
            r_rho: neg(m)?,
            r_u: neg(a)?,
            r_v: neg(b)?,
        });
    }
    Ok(out)
}

/// Residual of the composed approximate solution.
pub fn ns_residual(bundle: &AnsatzBundle, params: &SimParams) -> Result<Vec<Residual>> {
    trajectory_residual(&bundle.composed, params, bundle.epsilon)
}

/// Residual norms at one level, restricted to `y <= y_window`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    #[serde(rename = "R_rho_L2")]
    pub rho_l2: f64,
    #[serde(rename = "R_u_L2")]
    pub u_l2: f64,
    #[serde(rename = "R_v_L2")]
    pub v_l2: f64,
    #[serde(rename = "R_rho_Linf")]
    pub rho_linf: f64,
    #[serde(rename = "R_u_Linf")]
    pub u_linf: f64,
    #[serde(rename = "R_v_Linf")]
    pub v_linf: f64,
    /// Root-sum-square of the three L2 norms.
    #[serde(rename = "R_L2")]
    pub total_l2: f64,
}

impl ResidualNorms {
    pub fn of(r: &Residual, y_window: f64) -> Self {
        let (a, b, c) = (
            r.r_rho.l2_norm_below(y_window),
            r.r_u.l2_norm_below(y_window),
            r.r_v.l2_norm_below(y_window),
        );
        ResidualNorms {
            rho_l2: a,
            u_l2: b,
            v_l2: c,
            rho_linf: r.r_rho.max_abs_below(y_window),
            u_linf: r.r_u.max_abs_below(y_window),
            v_linf: r.r_v.max_abs_below(y_window),
            total_l2: (a * a + b * b + c * c).sqrt(),
        }
    }
}

/// One line of the residual report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub epsilon: f64,
    pub time: f64,
    pub y_window: f64,
    pub norms: ResidualNorms,
}

pub fn residual_report(eps: f64, residuals: &[Residual], y_window: f64) -> Vec<ResidualReport> {
    residuals
        .iter()
        .map(|r| ResidualReport {
            epsilon: eps,
            time: r.t,
            y_window,
            norms: ResidualNorms::of(r, y_window),
        })
        .collect()
}
