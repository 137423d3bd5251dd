//! Compressible Navier-Stokes at viscosity `epsilon^2` with no-slip walls.
//!
//! Each step is Strang split: half a viscous step, one convective SSP-RK2
//! step of the Euler finite-volume operator (with no-slip wall rows), and
//! another half viscous step. The viscous half steps act on the primitive
//! velocities with the density held fixed, which is exact because mass
//! carries no viscous flux. They use Douglas ADI with `theta = 1/2`:
//! periodic line solves in `x`, line solves in `y`, and the mixed
//! `grad div` coupling explicit with one fixed-point correction.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::fv::{check_cons, Cons, FvOperator, Source, WallKind};
use crate::field::State;
use crate::grid::Grid2D;
use crate::linalg::{cyclic_thomas, thomas};
use crate::params::SimParams;
use crate::stencil::{fornberg, DiffMatrix};

/// Diagnostics recorded after every step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallFluxRecord {
    pub t: f64,
    /// `max_x |eps^2 nu d_y u(x, 0)|`.
    pub wall_shear: f64,
    /// `int rho(t) - int rho(0)`.
    pub mass_defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CNSTrajectory {
    pub states: Vec<State>,
    pub epsilon: f64,
    /// Time step actually used.
    pub dt: f64,
    pub wall_flux_log: Vec<WallFluxRecord>,
}

impl CNSTrajectory {
    pub fn grid(&self) -> &Arc<Grid2D> {
        self.states[0].grid()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Lid treatment. `Free` imposes nothing: the lid row takes its `d_yy` from
/// a one-sided stencil, explicitly. `Dirichlet` rows are zero.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Top {
    Free,
    Dirichlet,
}

/// Frozen-coefficient viscous operators on one grid.
struct Viscous {
    nx: usize,
    ny: usize,
    dx: f64,
    d1: DiffMatrix,
    /// Three-point `d_yy` weights for the interior rows; row 0 unused.
    d2: Vec<[f64; 3]>,
    /// One-sided `d_yy` weights on the top three nodes.
    d2_top: [f64; 3],
}

impl Viscous {
    fn new(grid: &Grid2D) -> Self {
        let y = grid.y_nodes();
        let ny = y.len();
        let mut d2 = vec![[0.0; 3]; ny];
        for j in 1..ny - 1 {
            let w = &fornberg(y[j], &y[j - 1..j + 2], 2)[2];
            d2[j] = [w[0], w[1], w[2]];
        }
        let w = &fornberg(y[ny - 1], &y[ny - 3..], 2)[2];
        Viscous {
            d2_top: [w[0], w[1], w[2]],
            nx: grid.nx(),
            ny,
            dx: grid.dx(),
            d1: DiffMatrix::new(y, 1, 3),
            d2,
        }
    }

    fn lap_x(&self, f: &Array2<f64>, c: &Array2<f64>) -> Array2<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let s = 1.0 / (self.dx * self.dx);
        Array2::from_shape_fn((nx, ny), |(i, j)| {
            let ip = (i + 1) % nx;
            let im = (i + nx - 1) % nx;
            c[(i, j)] * s * (f[(im, j)] - 2.0 * f[(i, j)] + f[(ip, j)])
        })
    }

    fn lap_y(&self, f: &Array2<f64>, c: &Array2<f64>, top: Top) -> Array2<f64> {
        let ny = self.ny;
        let mut out = Array2::zeros(f.dim());
        for i in 0..self.nx {
            for j in 1..ny - 1 {
                let w = &self.d2[j];
                out[(i, j)] =
                    c[(i, j)] * (w[0] * f[(i, j - 1)] + w[1] * f[(i, j)] + w[2] * f[(i, j + 1)]);
            }
            if top == Top::Free {
                let w = &self.d2_top;
                out[(i, ny - 1)] = c[(i, ny - 1)]
                    * (w[0] * f[(i, ny - 3)] + w[1] * f[(i, ny - 2)] + w[2] * f[(i, ny - 1)]);
            }
        }
        out
    }

    /// `c d_x d_y f`: central in `x`, three-point in `y`.
    fn mixed(&self, f: &Array2<f64>, c: &Array2<f64>) -> Array2<f64> {
        let fy = self.d1.apply_columns(f);
        let nx = self.nx;
        let s = 0.5 / self.dx;
        Array2::from_shape_fn(f.dim(), |(i, j)| {
            c[(i, j)] * s * (fy[((i + 1) % nx, j)] - fy[((i + nx - 1) % nx, j)])
        })
    }

    fn clear_rows(&self, f: &mut Array2<f64>, top: Top) {
        f.column_mut(0).fill(0.0);
        if top == Top::Dirichlet {
            f.column_mut(self.ny - 1).fill(0.0);
        }
    }

    /// One Douglas ADI step of `f_t = cx f_xx + cy f_yy + m` over `h`.
    fn douglas(
        &self,
        f: &Array2<f64>,
        cx: &Array2<f64>,
        cy: &Array2<f64>,
        m: &Array2<f64>,
        h: f64,
        top: Top,
    ) -> Result<Array2<f64>> {
        let (nx, ny) = (self.nx, self.ny);
        let th = 0.5 * h;
        let ax = self.lap_x(f, cx);
        let ay = self.lap_y(f, cy, top);
        let mut w = f + &((&ax * th) + (&ay * h) + (m * h));
        self.clear_rows(&mut w, top);

        let s = th / (self.dx * self.dx);
        let mut lower = vec![0.0; nx];
        let mut diag = vec![0.0; nx];
        let mut upper = vec![0.0; nx];
        let mut line = vec![0.0; nx];
        let last = if top == Top::Free { ny } else { ny - 1 };
        for j in 1..last {
            for i in 0..nx {
                let c = s * cx[(i, j)];
                lower[i] = -c;
                upper[i] = -c;
                diag[i] = 1.0 + 2.0 * c;
                line[i] = w[(i, j)];
            }
            cyclic_thomas(&lower, &diag, &upper, &mut line)?;
            for i in 0..nx {
                w[(i, j)] = line[i];
            }
        }

        // the free lid row keeps its y diffusion fully explicit
        let lid = w.column(ny - 1).to_owned();
        w.scaled_add(-th, &ay);
        if top == Top::Free {
            w.column_mut(ny - 1).assign(&lid);
        }
        let mut lower = vec![0.0; ny];
        let mut diag = vec![1.0; ny];
        let mut upper = vec![0.0; ny];
        let mut col = vec![0.0; ny];
        let mut scratch = vec![0.0; ny];
        for i in 0..nx {
            for j in 1..ny - 1 {
                let c = th * cy[(i, j)];
                let d = &self.d2[j];
                lower[j] = -c * d[0];
                diag[j] = 1.0 - c * d[1];
                upper[j] = -c * d[2];
            }
            for j in 0..ny {
                col[j] = w[(i, j)];
            }
            col[0] = 0.0;
            if top == Top::Dirichlet {
                col[ny - 1] = 0.0;
            }
            thomas(&lower, &diag, &upper, &mut col, &mut scratch)?;
            for j in 0..ny {
                w[(i, j)] = col[j];
            }
        }
        if !w.iter().all(|v| v.is_finite()) {
            return Err(Error::LinearSolve("viscous line solve produced non-finite values".into()));
        }
        Ok(w)
    }

    /// Viscous update of the momenta in `q` over `h`, density unchanged.
    fn step(&self, q: &mut Cons, eps: f64, params: &SimParams, h: f64) -> Result<()> {
        let e2 = eps * eps;
        let k = q.rho.mapv(|r| e2 / r);
        let (nu, lam) = (params.nu, params.nu + params.sigma);
        let (c_long, c_shear, c_mix) = (&k * (nu + lam), &k * nu, &k * lam);
        let u = &q.m / &q.rho;
        let v = &q.n / &q.rho;

        let mu0 = self.mixed(&v, &c_mix);
        let mv0 = self.mixed(&u, &c_mix);
        let u1 = self.douglas(&u, &c_long, &c_shear, &mu0, h, Top::Free)?;
        let v1 = self.douglas(&v, &c_shear, &c_long, &mv0, h, Top::Dirichlet)?;
        // one fixed-point pass: trapezoidal mixed term
        let mu = (&mu0 + &self.mixed(&v1, &c_mix)) * 0.5;
        let mv = (&mv0 + &self.mixed(&u1, &c_mix)) * 0.5;
        let u2 = self.douglas(&u, &c_long, &c_shear, &mu, h, Top::Free)?;
        let v2 = self.douglas(&v, &c_shear, &c_long, &mv, h, Top::Dirichlet)?;
        q.m = &q.rho * &u2;
        q.n = &q.rho * &v2;
        Ok(())
    }
}

/// Reusable per-grid state for repeated steps.
struct Stepper<'a> {
    fv: FvOperator,
    visc: Viscous,
    eps: f64,
    params: &'a SimParams,
    source: Option<Source<'a>>,
    scratch: [Cons; 2],
}

impl<'a> Stepper<'a> {
    fn new(grid: &Arc<Grid2D>, eps: f64, params: &'a SimParams, source: Option<Source<'a>>) -> Self {
        Stepper {
            fv: FvOperator::new(grid, params),
            visc: Viscous::new(grid),
            eps,
            params,
            source,
            scratch: [Cons::zeros(grid.nx(), grid.ny()), Cons::zeros(grid.nx(), grid.ny())],
        }
    }

    fn step(&mut self, q: &Cons, t: f64, dt: f64) -> Result<Cons> {
        let mut a = q.clone();
        self.visc.step(&mut a, self.eps, self.params, 0.5 * dt)?;
        let mut b = self
            .fv
            .rk2_step(&a, t, dt, WallKind::NoSlip, self.source, &mut self.scratch);
        self.visc.step(&mut b, self.eps, self.params, 0.5 * dt)?;
        self.fv.apply_walls(&mut b, WallKind::NoSlip);
        Ok(b)
    }
}

fn check_pre(grid: &Grid2D, eps: f64, params: &SimParams) -> Result<()> {
    params.validate()?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParam {
            name: "epsilon",
            reason: format!("must be positive, got {eps}"),
        });
    }
    grid.check_resolves_layer(eps)
}

fn check_no_slip(state: &State) -> Result<()> {
    if state.u.wall().iter().chain(&state.v.wall()).any(|&w| w != 0.0) {
        return Err(Error::Config("initial state violates the no-slip condition".into()));
    }
    Ok(())
}

/// One split step of length `dt`.
pub fn step_cns(state: &State, epsilon: f64, dt: f64, params: &SimParams) -> Result<State> {
    step_cns_with_source(state, epsilon, dt, params, None)
}

/// [`step_cns`] with a conservative-form source (manufactured solutions).
pub fn step_cns_with_source(
    state: &State,
    epsilon: f64,
    dt: f64,
    params: &SimParams,
    source: Option<Source>,
) -> Result<State> {
    let grid = state.grid();
    check_pre(grid, epsilon, params)?;
    let mut st = Stepper::new(grid, epsilon, params, source);
    let q = Cons::from_state(state);
    let limit = st.fv.cfl_limit(&q);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    let next = st.step(&q, state.t, dt)?;
    let t = state.t + dt;
    check_cons(&next, grid, params.c0, params.blowup_grad, t)?;
    next.to_state(grid, t)
}

fn wall_shear(q: &Cons, visc: &Viscous, eps: f64, nu: f64) -> f64 {
    let (s, w) = visc.d1.row(0);
    (0..visc.nx)
        .map(|i| {
            let uy: f64 = (0..w.len())
                .map(|k| w[k] * q.m[(i, s + k)] / q.rho[(i, s + k)])
                .sum();
            (eps * eps * nu * uy).abs()
        })
        .fold(0.0, f64::max)
}

fn mass(q: &Cons, grid: &Grid2D) -> f64 {
    let w = grid.cell_widths();
    let dx = grid.dx();
    q.rho
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(w).map(|(r, h)| r * h).sum::<f64>() * dx)
        .sum()
}

/// Advance `init` to `t_final` with `dt = min(CFL limit, t_final / dt_cap_divisor)`,
/// storing the levels of [`SimParams::save_levels`].
pub fn solve_cns(init: &State, epsilon: f64, t_final: f64, params: &SimParams) -> Result<CNSTrajectory> {
    solve_cns_with_source(init, epsilon, t_final, params, None)
}

pub fn solve_cns_with_source(
    init: &State,
    epsilon: f64,
    t_final: f64,
    params: &SimParams,
    source: Option<Source>,
) -> Result<CNSTrajectory> {
    let grid = init.grid();
    check_pre(grid, epsilon, params)?;
    if t_final < 0.0 {
        return Err(Error::Config(format!("negative horizon {t_final}")));
    }
    init.check_finite()?;
    init.check_density_floor(params.c0)?;
    check_no_slip(init)?;

    let mut st = Stepper::new(grid, epsilon, params, source);
    let mut q = Cons::from_state(init);
    let m0 = mass(&q, grid);
    let (nsave, save_dt) = params.save_levels(t_final);
    let cap = if t_final > 0.0 {
        t_final / params.dt_cap_divisor as f64
    } else {
        f64::INFINITY
    };
    let mut states = vec![init.clone()];
    let mut log = Vec::new();
    let mut dt_used = 0.0_f64;
    let t0 = init.t;
    let mut last_good = init.clone();
    for level in 1..=nsave {
        let t_start = t0 + (level - 1) as f64 * save_dt;
        let t_end = if level == nsave {
            t0 + t_final
        } else {
            t0 + level as f64 * save_dt
        };
        let span = t_end - t_start;
        let target = st.fv.cfl_limit(&q).min(cap);
        let nsub = (span / target * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = span / nsub as f64;
        dt_used = dt_used.max(dt);
        let mut t = t_start;
        for _ in 0..nsub {
            let stepped = st
                .step(&q, t, dt)
                .and_then(|next| check_cons(&next, grid, params.c0, params.blowup_grad, t + dt).map(|_| next));
            q = match stepped {
                Ok(next) => next,
                Err(cause) => {
                    return Err(Error::Aborted {
                        t: t + dt,
                        cause: Box::new(cause),
                        last_good: Box::new(last_good),
                    })
                }
            };
            t += dt;
            log.push(WallFluxRecord {
                t,
                wall_shear: wall_shear(&q, &st.visc, epsilon, params.nu),
                mass_defect: mass(&q, grid) - m0,
            });
        }
        let s = q.to_state(grid, t_end)?;
        last_good = s.clone();
        states.push(s);
    }
    Ok(CNSTrajectory {
        states,
        epsilon,
        dt: dt_used,
        wall_flux_log: log,
    })
}
