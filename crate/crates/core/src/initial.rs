//! Catalog of analytic initial profiles and the run-configuration schema.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field2D, State};
use crate::grid::{Grid2D, GridSpec};
use crate::params::SimParams;
use crate::stencil::{dxx4, fornberg};

/// Amplitudes of the catalog profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitudes {
    /// Tangential-velocity amplitude `A`.
    pub u: f64,
    /// Density-perturbation amplitude `B`.
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub spec: String,
    pub amplitudes: Amplitudes,
}

impl InitialSpec {
    pub fn rest() -> Self {
        InitialSpec {
            spec: "rest".into(),
            amplitudes: Amplitudes { u: 0.0, rho: 0.0 },
        }
    }

    pub fn shear_bump(u: f64, rho: f64) -> Self {
        InitialSpec {
            spec: "shear-bump".into(),
            amplitudes: Amplitudes { u, rho },
        }
    }
}

/// `{params, grid, initial}` run configuration. Every field is required.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: SimParams,
    pub grid: GridSpec,
    pub initial: InitialSpec,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.params.validate()?;
        Ok(cfg)
    }
}

/// Closed-form catalog profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Rest,
    /// `u = A sin(kx) y^2 e^-y`, `v = 0`, `rho = 1 + B sin(kx) (1 + y) e^-y`.
    ShearBump { a: f64, b: f64, k: f64 },
}

impl Profile {
    pub fn parse(spec: &InitialSpec, lx: f64) -> Result<Self> {
        let k = 2.0 * std::f64::consts::PI / lx;
        match spec.spec.as_str() {
            "rest" => Ok(Profile::Rest),
            "shear-bump" => Ok(Profile::ShearBump {
                a: spec.amplitudes.u,
                b: spec.amplitudes.rho,
                k,
            }),
            other => Err(Error::UnknownProfile(other.to_string())),
        }
    }

    pub fn rho(&self, x: f64, y: f64) -> f64 {
        match *self {
            Profile::Rest => 1.0,
            Profile::ShearBump { b, k, .. } => 1.0 + b * (k * x).sin() * (1.0 + y) * (-y).exp(),
        }
    }

    pub fn u(&self, x: f64, y: f64) -> f64 {
        match *self {
            Profile::Rest => 0.0,
            Profile::ShearBump { a, k, .. } => a * (k * x).sin() * y * y * (-y).exp(),
        }
    }

    pub fn v(&self, _x: f64, _y: f64) -> f64 {
        0.0
    }
}

/// Build a catalog initial state on `grid`.
pub fn make_initial_data(spec: &InitialSpec, grid: &Arc<Grid2D>, params: &SimParams) -> Result<State> {
    let profile = Profile::parse(spec, grid.lx())?;
    let state = State {
        rho: Field2D::from_fn(grid, |x, y| profile.rho(x, y)),
        u: Field2D::from_fn(grid, |x, y| profile.u(x, y)),
        v: Field2D::from_fn(grid, |x, y| profile.v(x, y)),
        t: 0.0,
    };
    let (lo, hi) = (4.0 * params.c0, 1.0 / params.c0);
    let (min, max) = (state.rho.min(), state.rho.max());
    if min < lo || max > hi {
        return Err(Error::DensityBounds { min, max, lo, hi });
    }
    Ok(state)
}

/// Wall traces of `d_t^k (u, v)` for `k <= order` implied by the
/// Navier-Stokes right-hand side. Entry `k` is the largest pointwise
/// magnitude over wall nodes.
pub fn compatibility_residual(state: &State, params: &SimParams, order: usize) -> Result<Vec<f64>> {
    if order > 1 {
        return Err(Error::Config(format!(
            "compatibility order {order} unsupported (orders 0 and 1 only)"
        )));
    }
    let grid = state.grid();
    let nx = grid.nx();
    let mut out = vec![0.0; order + 1];
    out[0] = (0..nx)
        .map(|i| state.u.values()[(i, 0)].hypot(state.v.values()[(i, 0)]))
        .fold(0.0, f64::max);
    if order == 0 {
        return Ok(out);
    }

    let y = grid.y_nodes();
    let width = 6.min(y.len());
    let w = fornberg(0.0, &y[..width], 2);
    let dy_wall = |f: &Field2D, i: usize, m: usize| -> f64 {
        (0..width).map(|k| w[m][k] * f.values()[(i, k)]).sum()
    };
    let dx = grid.dx();
    let uxx = dxx4(state.u.values(), dx);
    let vxx = dxx4(state.v.values(), dx);
    let vy = Field2D::from_array(grid, crate::stencil::dx4(state.v.values(), dx))?;
    let uy_wall: Vec<f64> = (0..nx).map(|i| dy_wall(&state.u, i, 1)).collect();
    let uxy = crate::stencil::dx4_1d(&uy_wall, dx);
    let eps2 = params.epsilon * params.epsilon;
    let mut r1 = 0.0_f64;
    for i in 0..nx {
        let rho = state.rho.values()[(i, 0)];
        if !(rho > 0.0) {
            return Err(Error::NonPositiveDensity { i, j: 0, value: rho });
        }
        let u_yy = dy_wall(&state.u, i, 2);
        let v_yy = dy_wall(&state.v, i, 2);
        let v_xy = dy_wall(&vy, i, 1);
        let rho_x = crate::stencil::dx4_1d(&state.rho.wall(), dx)[i];
        let rho_y = dy_wall(&state.rho, i, 1);
        let p_slope = params.sound_speed_sq(rho);
        let (u0, v0) = (state.u.values()[(i, 0)], state.v.values()[(i, 0)]);
        // convective terms vanish for a compatible order-0 trace; kept for generality
        let conv_u = u0 * crate::stencil::dx4_1d(&state.u.wall(), dx)[i] + v0 * uy_wall[i];
        let conv_v = u0 * crate::stencil::dx4_1d(&state.v.wall(), dx)[i] + v0 * dy_wall(&state.v, i, 1);
        let ut = -conv_u
            + (eps2 * params.nu * (uxx[(i, 0)] + u_yy)
                + eps2 * (params.nu + params.sigma) * (uxx[(i, 0)] + v_xy)
                - p_slope * rho_x)
                / rho;
        let vt = -conv_v
            + (eps2 * params.nu * (vxx[(i, 0)] + v_yy)
                + eps2 * (params.nu + params.sigma) * (uxy[i] + v_yy)
                - p_slope * rho_y)
                / rho;
        r1 = r1.max(ut.hypot(vt));
    }
    out[1] = r1;
    Ok(out)
}
