//! Measured quantities shared by the scheme tests and the acceptance suite.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use zerovisc::ansatz::construct_ansatz;
use zerovisc::cns::{solve_cns, solve_cns_with_source};
use zerovisc::euler::{solve_euler, solve_euler_with_source, solve_linearized_euler};
use zerovisc::{make_initial_data, BLGridSpec, Field2D, Grid2D, InitialSpec, SimParams, State};

use super::{combined, errors, Manufactured};

const LX: f64 = 2.0 * PI;

/// Manufactured Euler errors per field at T = 0.2 on an `nx x (nx+1)` grid over `[0, 2]`.
pub fn euler_mms_errors(nx: usize, limiter: bool) -> [f64; 3] {
    let y_max = 2.0;
    let g = Arc::new(Grid2D::new(nx, nx + 1, LX, y_max, 1.0).unwrap());
    let m = Manufactured::new(y_max);
    let t_final = 0.2;
    let p = SimParams {
        save_dt: t_final,
        limiter,
        ..SimParams::default()
    };
    let ps = p.clone();
    let src = move |t: f64, x: f64, y: f64| m.source(&ps, 0.0, 0.0, t, x, y);
    let traj = solve_euler_with_source(&m.state(&g, 0.0), t_final, &p, Some(&src)).unwrap();
    errors(traj.last(), &m)
}

/// Combined manufactured Euler errors at nx = 32, 64, 128.
pub fn euler_mms() -> Vec<f64> {
    [32, 64, 128].iter().map(|&n| combined(&euler_mms_errors(n, false))).collect()
}

/// Combined manufactured Navier-Stokes errors at eps = 0.5, T = 0.1 on
/// stretched grids nx = 32, 64, 128.
pub fn cns_mms() -> Vec<f64> {
    let eps = 0.5;
    let t_final = 0.1;
    let p = SimParams {
        dt_cap_divisor: 200,
        save_dt: t_final,
        ..SimParams::default()
    };
    let ms = Manufactured::new(4.0);
    let mu = eps * eps * p.nu;
    let mu_b = eps * eps * (p.nu + p.sigma);
    let src = |t: f64, x: f64, y: f64| ms.source(&p, mu, mu_b, t, x, y);
    [32, 64, 128]
        .iter()
        .map(|&nx| {
            let g = Arc::new(Grid2D::new(nx, nx + 1, LX, 4.0, 1.5).unwrap());
            let traj = solve_cns_with_source(&ms.state(&g, 0.0), eps, t_final, &p, Some(&src)).unwrap();
            combined(&errors(traj.last(), &ms))
        })
        .collect()
}

/// Sine-series solution of `u_t = d u_yy` on `[0, Y]` with `u(0) = 0`,
/// `u_y(Y) = 0`. Coefficients by composite Simpson on a fine uniform grid.
pub fn heat_series(u0: impl Fn(f64) -> f64, y_max: f64, d: f64, t: f64, modes: usize) -> impl Fn(f64) -> f64 {
    let n = 40_000;
    let h = y_max / n as f64;
    let samples: Vec<f64> = (0..=n).map(|k| u0(k as f64 * h)).collect();
    let coeffs: Vec<(f64, f64)> = (0..modes)
        .map(|m| {
            let k = (m as f64 + 0.5) * PI / y_max;
            let mut acc = 0.0;
            for (idx, f) in samples.iter().enumerate() {
                let w = if idx == 0 || idx == n {
                    1.0
                } else if idx % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * f * (k * idx as f64 * h).sin();
            }
            let b = 2.0 / y_max * acc * h / 3.0;
            (k, b * (-d * k * k * t).exp())
        })
        .collect();
    move |y| coeffs.iter().map(|(k, b)| b * (k * y).sin()).sum()
}

/// A decaying shear layer through the full Navier-Stokes solver against the
/// heat-equation series. Returns the relative L2 error and the final state.
pub fn heat_benchmark() -> (f64, State) {
    let eps = 0.1;
    let t_final = 0.1;
    let p = SimParams::default();
    let g = Arc::new(Grid2D::with_wall_spacing(8, 161, LX, 4.0, eps / 8.0).unwrap());
    let ell = 0.1;
    let profile = move |y: f64| 0.1 * (y / ell) * (-y / ell).exp();
    let init = State {
        rho: Field2D::constant(&g, 1.0),
        u: Field2D::from_fn(&g, |_, y| profile(y)),
        v: Field2D::zeros(&g),
        t: 0.0,
    };
    let traj = solve_cns(&init, eps, t_final, &p).unwrap();
    let exact = heat_series(profile, 4.0, eps * eps * p.nu, t_final, 600);
    let reference = Field2D::from_fn(&g, |_, y| exact(y));
    let last = traj.last().clone();
    let err = last.u.zip_with(&reference, |a, b| a - b).l2_norm() / reference.l2_norm();
    (err, last)
}

/// Largest relative homogeneity and additivity defects of the linearized
/// outer solver over shear-bump background, all levels and fields.
pub fn linearity_defects() -> (f64, f64) {
    let p = SimParams::default();
    let g = Arc::new(Grid2D::new(24, 25, LX, 4.0, 1.5).unwrap());
    let init = make_initial_data(&InitialSpec::shear_bump(0.1, 0.1), &g, &p).unwrap();
    let bg = solve_euler(&init, 0.05, &p).unwrap();
    let times = bg.times();
    let a = Array2::from_shape_fn((times.len(), g.nx()), |(k, i)| times[k] * g.x(i).sin() * 0.01);
    let b = Array2::from_shape_fn((times.len(), g.nx()), |(k, i)| times[k] * times[k] * g.x(i).cos());
    let sa = solve_linearized_euler(&bg, &a, 0.05, &p).unwrap();
    let sa2 = solve_linearized_euler(&bg, &(&a * 2.0), 0.05, &p).unwrap();
    let sb = solve_linearized_euler(&bg, &b, 0.05, &p).unwrap();
    let sab = solve_linearized_euler(&bg, &(&a + &b), 0.05, &p).unwrap();
    let (mut hom, mut add) = (0.0_f64, 0.0_f64);
    for k in 0..times.len() {
        for (f, f2, fb, fab) in [
            (&sa.states[k].rho, &sa2.states[k].rho, &sb.states[k].rho, &sab.states[k].rho),
            (&sa.states[k].u, &sa2.states[k].u, &sb.states[k].u, &sab.states[k].u),
            (&sa.states[k].v, &sa2.states[k].v, &sb.states[k].v, &sab.states[k].v),
        ] {
            let h = (f2.values() - &(f.values() * 2.0)).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let s = (fab.values() - &(f.values() + fb.values())).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            hom = hom.max(h / f2.max_abs().max(1e-300));
            add = add.max(s / fab.max_abs().max(1.0));
        }
    }
    (hom, add)
}

/// `max |u_a|, |v_a|` on the wall over every level of a shear-bump ansatz.
pub fn composed_wall_trace(nx: usize, ny: usize, eps: f64, t_final: f64) -> (f64, f64) {
    let p = SimParams::default();
    let g = Arc::new(Grid2D::with_wall_spacing(nx, ny, LX, 4.0, eps / 8.0).unwrap());
    let s = make_initial_data(&InitialSpec::shear_bump(0.1, 0.1), &g, &p).unwrap();
    let b = construct_ansatz(&s, &BLGridSpec::default(), &p, eps, t_final).unwrap();
    let wall = |f: &Field2D| f.wall().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    b.composed
        .iter()
        .fold((0.0, 0.0), |(u, v), s| (u.max(wall(&s.u)), v.max(wall(&s.v))))
}
