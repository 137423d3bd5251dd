//! Outer inviscid flow: the compressible Euler system with a slip wall, its
//! linearization about a background trajectory, and wall traces.

pub mod fv;
mod linearized;
mod traces;

use std::sync::Arc;

pub use linearized::solve_linearized_euler;
pub use traces::{extract_traces, CorrectorTraces, TraceSlice, WallTraces};

use crate::error::{Error, Result};
use crate::field::State;
use crate::grid::Grid2D;
use crate::params::SimParams;
use fv::{check_cons, Cons, FvOperator, Source, WallKind};

/// States at the stored time levels.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerTrajectory {
    pub states: Vec<State>,
    /// Spacing of the stored levels.
    pub dt: f64,
    /// 0 for the background flow, 1 for the first-order corrector.
    pub order_tag: u8,
}

impl EulerTrajectory {
    pub fn grid(&self) -> &Arc<Grid2D> {
        self.states[0].grid()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory is never empty")
    }

    /// State at the stored level closest to `t`.
    pub fn nearest(&self, t: f64) -> &State {
        self.states
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("trajectory is never empty")
    }
}

fn check_step(op: &FvOperator, u: &Cons, dt: f64) -> Result<()> {
    let limit = op.cfl_limit(u);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    Ok(())
}

/// One SSP-RK2 step of the Euler system with a slip wall.
pub fn step_euler(state: &State, dt: f64, params: &SimParams) -> Result<State> {
    step_euler_with_source(state, dt, params, None)
}

/// [`step_euler`] with a manufactured source in conservative form.
pub fn step_euler_with_source(
    state: &State,
    dt: f64,
    params: &SimParams,
    source: Option<Source>,
) -> Result<State> {
    let op = FvOperator::new(state.grid(), params);
    let u = Cons::from_state(state);
    check_step(&op, &u, dt)?;
    let nx = state.grid().nx();
    let ny = state.grid().ny();
    let mut scratch = [Cons::zeros(nx, ny), Cons::zeros(nx, ny)];
    let next = op.rk2_step(&u, state.t, dt, WallKind::Slip, source, &mut scratch);
    let t = state.t + dt;
    check_cons(&next, state.grid(), params.c0, params.blowup_grad, t)?;
    next.to_state(state.grid(), t)
}

/// Advance `init` to `t_final`, storing the levels of [`SimParams::save_levels`].
pub fn solve_euler(init: &State, t_final: f64, params: &SimParams) -> Result<EulerTrajectory> {
    solve_euler_with_source(init, t_final, params, None)
}

pub fn solve_euler_with_source(
    init: &State,
    t_final: f64,
    params: &SimParams,
    source: Option<Source>,
) -> Result<EulerTrajectory> {
    params.validate()?;
    if t_final < 0.0 {
        return Err(Error::Config(format!("negative horizon {t_final}")));
    }
    init.check_finite()?;
    init.check_density_floor(params.c0)?;
    let grid = init.grid();
    let (nsave, save_dt) = params.save_levels(t_final);
    let op = FvOperator::new(grid, params);
    let mut u = Cons::from_state(init);
    op.apply_walls(&mut u, WallKind::Slip);
    let mut states = vec![init.clone()];
    let mut scratch = [Cons::zeros(grid.nx(), grid.ny()), Cons::zeros(grid.nx(), grid.ny())];
    let t0 = init.t;
    for level in 1..=nsave {
        let t_start = t0 + (level - 1) as f64 * save_dt;
        let t_end = if level == nsave {
            t0 + t_final
        } else {
            t0 + level as f64 * save_dt
        };
        let h = t_end - t_start;
        let nsub = (h / op.cfl_limit(&u)).ceil().max(1.0) as usize;
        let dt = h / nsub as f64;
        let mut t = t_start;
        for _ in 0..nsub {
            u = op.rk2_step(&u, t, dt, WallKind::Slip, source, &mut scratch);
            t += dt;
            check_cons(&u, grid, params.c0, params.blowup_grad, t)?;
        }
        states.push(u.to_state(grid, t_end)?);
    }
    Ok(EulerTrajectory {
        states,
        dt: save_dt,
        order_tag: 0,
    })
}
