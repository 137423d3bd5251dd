//! First-order outer corrector: Euler linearized about a background
//! trajectory, driven only by a prescribed normal velocity at the wall.
//!
//! The unknowns are the linearized conservative variables
//! `(rho1, m1, n1) = (rho1, rho0 u1 + rho1 u0, rho0 v1 + rho1 v0)`; face
//! fluxes are Jacobian-vector products with Rusanov dissipation sized by the
//! background wave speed, so the discrete map is exactly linear in the data.

use ndarray::Array2;

use super::fv::Cons;
use super::EulerTrajectory;
use crate::error::{Error, Result};
use crate::field::{Field2D, State};
use crate::params::SimParams;
use crate::stencil::DiffMatrix;
use crate::timegrid;

struct Background<'a> {
    cons: Vec<Cons>,
    times: Vec<f64>,
    traj: &'a EulerTrajectory,
}

impl Background<'_> {
    fn at(&self, t: f64, out: &mut Cons) -> Result<()> {
        let (k, th) = timegrid::locate(&self.times, t)?;
        if th == 0.0 {
            out.clone_from(&self.cons[k]);
        } else {
            out.clone_from(&self.cons[k]);
            out.combine(1.0 - th, th, &self.cons[k + 1], 0.0, &self.cons[k + 1]);
        }
        Ok(())
    }
}

#[inline]
fn jvp_x(r: f64, m: f64, n: f64, c2: f64, q: [f64; 3]) -> [f64; 3] {
    let u = m / r;
    let v = n / r;
    [
        q[1],
        2.0 * u * q[1] + (c2 - u * u) * q[0],
        v * q[1] + u * q[2] - u * v * q[0],
    ]
}

#[inline]
fn jvp_y(r: f64, m: f64, n: f64, c2: f64, q: [f64; 3]) -> [f64; 3] {
    let u = m / r;
    let v = n / r;
    [
        q[2],
        v * q[1] + u * q[2] - u * v * q[0],
        2.0 * v * q[2] + (c2 - v * v) * q[0],
    ]
}

struct LinOp<'a> {
    traj: &'a EulerTrajectory,
    params: &'a SimParams,
    dy: DiffMatrix,
}

impl LinOp<'_> {
    fn rhs(&self, q: &Cons, bg: &Cons, g: &[f64], out: &mut Cons) {
        let grid = self.traj.grid();
        let (nx, ny) = (grid.nx(), grid.ny());
        let dx = grid.dx();
        let w = grid.cell_widths();
        let y = grid.y_nodes();
        let p = self.params;
        out.rho.fill(0.0);
        out.m.fill(0.0);
        out.n.fill(0.0);
        let vars = [&q.rho, &q.m, &q.n];
        let speed = |i: usize, j: usize, dir: usize| -> f64 {
            let r = bg.rho[(i, j)];
            let vel = if dir == 0 { bg.m[(i, j)] } else { bg.n[(i, j)] } / r;
            vel.abs() + p.sound_speed_sq(r).sqrt()
        };
        let face_state = |a: (usize, usize), b: (usize, usize)| -> (f64, f64, f64, f64) {
            let r = 0.5 * (bg.rho[a] + bg.rho[b]);
            let m = 0.5 * (bg.m[a] + bg.m[b]);
            let n = 0.5 * (bg.n[a] + bg.n[b]);
            (r, m, n, p.sound_speed_sq(r))
        };

        for j in 0..ny {
            for i in 0..nx {
                let ip = (i + 1) % nx;
                let im = (i + nx - 1) % nx;
                let ip2 = (i + 2) % nx;
                let mut ql = [0.0; 3];
                let mut qr = [0.0; 3];
                for (k, v) in vars.iter().enumerate() {
                    ql[k] = v[(i, j)] + 0.25 * (v[(ip, j)] - v[(im, j)]);
                    qr[k] = v[(ip, j)] - 0.25 * (v[(ip2, j)] - v[(i, j)]);
                }
                let (r, m, n, c2) = face_state((i, j), (ip, j));
                let fl = jvp_x(r, m, n, c2, ql);
                let fr = jvp_x(r, m, n, c2, qr);
                let a = speed(i, j, 0).max(speed(ip, j, 0));
                let f: [f64; 3] =
                    std::array::from_fn(|k| 0.5 * (fl[k] + fr[k]) - 0.5 * a * (qr[k] - ql[k]));
                out.rho[(i, j)] -= f[0] / dx;
                out.m[(i, j)] -= f[1] / dx;
                out.n[(i, j)] -= f[2] / dx;
                out.rho[(ip, j)] += f[0] / dx;
                out.m[(ip, j)] += f[1] / dx;
                out.n[(ip, j)] += f[2] / dx;
            }
        }

        let mut col = vec![vec![0.0; ny]; 3];
        let mut sl = vec![vec![0.0; ny]; 3];
        for i in 0..nx {
            for (k, v) in vars.iter().enumerate() {
                for j in 0..ny {
                    col[k][j] = v[(i, j)];
                }
                for (j, s) in sl[k].iter_mut().enumerate() {
                    let (st, wt) = self.dy.row(j);
                    *s = wt[0] * col[k][st] + wt[1] * col[k][st + 1] + wt[2] * col[k][st + 2];
                }
            }
            for j in 0..ny - 1 {
                let h = 0.5 * (y[j + 1] - y[j]);
                let mut ql = [0.0; 3];
                let mut qr = [0.0; 3];
                for k in 0..3 {
                    ql[k] = col[k][j] + h * sl[k][j];
                    qr[k] = col[k][j + 1] - h * sl[k][j + 1];
                }
                let (r, m, n, c2) = face_state((i, j), (i, j + 1));
                let gl = jvp_y(r, m, n, c2, ql);
                let gr = jvp_y(r, m, n, c2, qr);
                let a = speed(i, j, 1).max(speed(i, j + 1, 1));
                let f: [f64; 3] =
                    std::array::from_fn(|k| 0.5 * (gl[k] + gr[k]) - 0.5 * a * (qr[k] - ql[k]));
                out.rho[(i, j)] -= f[0] / w[j];
                out.m[(i, j)] -= f[1] / w[j];
                out.n[(i, j)] -= f[2] / w[j];
                out.rho[(i, j + 1)] += f[0] / w[j + 1];
                out.m[(i, j + 1)] += f[1] / w[j + 1];
                out.n[(i, j + 1)] += f[2] / w[j + 1];
            }
            // wall face: prescribed normal mass flux rho0 g, its tangential
            // momentum, and the pressure perturbation
            let r0 = bg.rho[(i, 0)];
            let u0 = bg.m[(i, 0)] / r0;
            let c2w = p.sound_speed_sq(r0);
            out.rho[(i, 0)] += r0 * g[i] / w[0];
            out.m[(i, 0)] += r0 * u0 * g[i] / w[0];
            out.n[(i, 0)] += c2w * col[0][0] / w[0];
            let rt = bg.rho[(i, ny - 1)];
            out.n[(i, ny - 1)] -= p.sound_speed_sq(rt) * col[0][ny - 1] / w[ny - 1];
        }
    }

    fn apply_walls(&self, q: &mut Cons, bg: &Cons, g: &[f64]) {
        let ny = q.rho.ncols();
        for (i, gi) in g.iter().enumerate() {
            q.n[(i, 0)] = bg.rho[(i, 0)] * gi + bg.n[(i, 0)] / bg.rho[(i, 0)] * q.rho[(i, 0)];
            q.n[(i, ny - 1)] = 0.0;
        }
    }
}

fn to_primitive(q: &Cons, bg: &Cons, g: &[f64], traj: &EulerTrajectory, t: f64) -> Result<State> {
    let grid = traj.grid();
    let u = (&q.m - &(&bg.m / &bg.rho * &q.rho)) / &bg.rho;
    let mut v = (&q.n - &(&bg.n / &bg.rho * &q.rho)) / &bg.rho;
    let ny = grid.ny();
    for (i, gi) in g.iter().enumerate() {
        v[(i, 0)] = *gi;
        v[(i, ny - 1)] = 0.0;
    }
    Ok(State {
        rho: Field2D::from_array(grid, q.rho.clone())?,
        u: Field2D::from_array(grid, u)?,
        v: Field2D::from_array(grid, v)?,
        t,
    })
}

/// Solve the linearized Euler system about `background` from zero data.
///
/// `wall_inflow` has shape `(nt, nx)` on the background's stored levels and
/// prescribes the corrector's normal velocity at `y = 0`.
pub fn solve_linearized_euler(
    background: &EulerTrajectory,
    wall_inflow: &Array2<f64>,
    t_final: f64,
    params: &SimParams,
) -> Result<EulerTrajectory> {
    let times = background.times();
    let grid = background.grid();
    if wall_inflow.nrows() != times.len() || wall_inflow.ncols() != grid.nx() {
        return Err(Error::TimeGrid(format!(
            "wall inflow shape {:?} does not match {} levels x {} nodes",
            wall_inflow.dim(),
            times.len(),
            grid.nx()
        )));
    }
    let t0 = times[0];
    if t0 + t_final > times[times.len() - 1] * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::TimeGrid(format!(
            "background ends at {} before horizon {}",
            times[times.len() - 1],
            t0 + t_final
        )));
    }
    let bgs = Background {
        cons: background.states.iter().map(Cons::from_state).collect(),
        times: times.clone(),
        traj: background,
    };
    let op = LinOp {
        traj: bgs.traj,
        params,
        dy: DiffMatrix::new(grid.y_nodes(), 1, 3),
    };
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut q = Cons::zeros(nx, ny);
    let mut bg = Cons::zeros(nx, ny);
    let mut bg1 = Cons::zeros(nx, ny);
    let mut k1 = Cons::zeros(nx, ny);
    let mut stage = Cons::zeros(nx, ny);
    bgs.at(t0, &mut bg)?;
    let g0 = wall_inflow.row(0).to_vec();
    op.apply_walls(&mut q, &bg, &g0);
    let mut states = vec![to_primitive(&q, &bg, &g0, background, t0)?];

    let h_min = grid.dx().min(grid.dy_min());
    let last = times
        .iter()
        .position(|&t| (t - (t0 + t_final)).abs() <= 1e-12 * t.abs().max(1.0))
        .ok_or_else(|| Error::TimeGrid(format!("horizon {t_final} is not a stored level")))?;
    for level in 1..=last {
        let (ta, tb) = (times[level - 1], times[level]);
        bgs.at(ta, &mut bg)?;
        let mut speed = 0.0_f64;
        for ((r, m), n) in bg.rho.iter().zip(bg.m.iter()).zip(bg.n.iter()) {
            speed = speed.max((m / r).abs() + (n / r).abs() + params.sound_speed_sq(*r).sqrt());
        }
        let nsub = ((tb - ta) / (params.cfl * h_min / speed)).ceil().max(1.0) as usize;
        let dt = (tb - ta) / nsub as f64;
        let mut t = ta;
        for s in 0..nsub {
            let t1 = if s + 1 == nsub { tb } else { t + dt };
            bgs.at(t, &mut bg)?;
            bgs.at(t1, &mut bg1)?;
            let g = timegrid::interp_row(wall_inflow, &times, t)?;
            let g1 = timegrid::interp_row(wall_inflow, &times, t1)?;
            op.rhs(&q, &bg, &g, &mut k1);
            stage.clone_from(&q);
            stage.combine(0.0, 1.0, &q, dt, &k1);
            op.apply_walls(&mut stage, &bg1, &g1);
            op.rhs(&stage, &bg1, &g1, &mut k1);
            q.combine(0.5, 0.5, &stage, dt, &k1);
            op.apply_walls(&mut q, &bg1, &g1);
            t = t1;
        }
        for (name, a) in [("rho1", &q.rho), ("m1", &q.m), ("n1", &q.n)] {
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { field: name, t: tb });
            }
        }
        bgs.at(tb, &mut bg)?;
        let g = wall_inflow.row(level).to_vec();
        states.push(to_primitive(&q, &bg, &g, background, tb)?);
    }
    Ok(EulerTrajectory {
        states,
        dt: background.dt,
        order_tag: 1,
    })
}
