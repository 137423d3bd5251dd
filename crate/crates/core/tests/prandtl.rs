mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::layer::{bl, divergence_residuals, full_operator_errors, gauss_tail, l2, sample, LX};
use ndarray::Array2;
use zerovisc::euler::{extract_traces, solve_euler, CorrectorTraces, WallTraces};
use zerovisc::prandtl::{
    compute_rho_p2, recover_vp_with, solve_prandtl_corrector, solve_prandtl_corrector_with_source,
    solve_prandtl_on, PrandtlSolution,
};
use zerovisc::timegrid::uniform;
use zerovisc::{make_initial_data, BLField, BLGrid, Grid2D, InitialSpec, SimParams};

fn zero_corrector(nt: usize, nx: usize) -> CorrectorTraces {
    let z = || Array2::zeros((nt, nx));
    CorrectorTraces {
        u1_bar: z(),
        rho1_bar: z(),
        v1_bar: z(),
        dvdy1_bar: z(),
        dxu1_bar: z(),
        dxv1_bar: z(),
    }
}

fn max_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn normal_velocity_matches_quadrature_oracle() {
    let g = bl(512, 192);
    let up = BLField::from_fn(&g, |x, z| x.sin() * (-z * z).exp());
    let (v, wall) = recover_vp_with(&up, &vec![1.0; 512]).unwrap();
    let exact = BLField::from_fn(&g, |x, z| x.cos() * gauss_tail(z));
    let err = max_diff(v.values(), exact.values());
    assert!(err < 1e-8, "v_p error {err:e}");
    for (i, w) in wall.iter().enumerate() {
        let x = i as f64 * g.dx();
        assert!((w - x.cos() * 0.5 * PI.sqrt()).abs() < 1e-8);
    }
}

/// Heat equation: rest outer flow and an x-independent manufactured layer
/// `u = t z exp(-z^2)`, so every transport term vanishes.
#[test]
fn heat_reduction_converges_at_second_order() {
    let t_final = 0.2;
    let mut errs = vec![];
    for (nz, nt) in [(48, 10), (96, 20), (192, 40)] {
        let g = bl(8, nz);
        let times = uniform(nt, t_final);
        let tr = WallTraces::rest(times, 8, LX);
        let src = |t: f64, _x: f64, z: f64| {
            let g = (-z * z).exp();
            z * g - t * (4.0 * z * z * z - 6.0 * z) * g
        };
        let sol = solve_prandtl_on(&g, &tr, t_final, &SimParams::default(), Some(&src)).unwrap();
        let exact = BLField::from_fn(&g, |_, z| t_final * z * (-z * z).exp());
        errs.push(l2(&g, &(sol.up0.last().unwrap().values() - exact.values())));
    }
    let orders = common::orders(&errs);
    assert!(orders.iter().all(|&p| p > 1.9), "errors {errs:?} orders {orders:?}");
}

#[test]
fn full_operator_manufactured_solution_converges() {
    let errs = full_operator_errors();
    let orders = common::orders(&errs);
    assert!(orders.iter().all(|&p| p > 1.9), "errors {errs:?} orders {orders:?}");
}

/// Independent 1-D solver for `u_t + a z u_z = kappa u_zz`, `u(0) = -U(t)`,
/// on a uniform grid: Crank-Nicolson with central stencils.
fn reference_1d(a: f64, kappa: f64, ub: impl Fn(f64) -> f64, t_final: f64, n: usize, steps: usize) -> (Vec<f64>, Vec<f64>) {
    let zmax = 12.0;
    let h = zmax / (n - 1) as f64;
    let z: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
    let dt = t_final / steps as f64;
    let mut u = vec![0.0; n];
    let op = |u: &[f64], k: usize| -> f64 {
        -a * z[k] * (u[k + 1] - u[k - 1]) / (2.0 * h) + kappa * (u[k + 1] - 2.0 * u[k] + u[k - 1]) / (h * h)
    };
    for s in 0..steps {
        let t1 = (s + 1) as f64 * dt;
        let mut lo = vec![0.0; n];
        let mut di = vec![1.0; n];
        let mut up = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for k in 1..n - 1 {
            let c_adv = a * z[k] / (2.0 * h);
            let c_dif = kappa / (h * h);
            lo[k] = -0.5 * dt * (c_dif + c_adv);
            di[k] = 1.0 + dt * c_dif;
            up[k] = -0.5 * dt * (c_dif - c_adv);
            rhs[k] = u[k] + 0.5 * dt * op(&u, k);
        }
        rhs[0] = -ub(t1);
        rhs[n - 1] = 0.0;
        for k in 1..n {
            let m = lo[k] / di[k - 1];
            di[k] -= m * up[k - 1];
            rhs[k] -= m * rhs[k - 1];
        }
        u[n - 1] = rhs[n - 1] / di[n - 1];
        for k in (0..n - 1).rev() {
            u[k] = (rhs[k] - up[k] * u[k + 1]) / di[k];
        }
    }
    (z, u)
}

#[test]
fn x_independent_layer_matches_one_dimensional_reference() {
    let t_final = 0.25;
    let a = 0.4;
    let rho = 1.3;
    let ub = |t: f64| 0.1 * (t / 0.25).powi(2);
    let times = uniform(400, t_final);
    let mut tr = WallTraces::rest(times.clone(), 4, LX);
    tr.u_bar = sample(&times, 4, |t, _| ub(t));
    tr.rho_bar.fill(rho);
    tr.dvdy_bar.fill(a);
    let g = bl(4, 768);
    let sol = solve_prandtl_on(&g, &tr, t_final, &SimParams::default(), None).unwrap();
    let (zr, ur) = reference_1d(a, 1.0 / rho, ub, t_final, 24001, 4000);
    let u = sol.up0.last().unwrap();
    let hr = zr[1];
    let mut err = 0.0_f64;
    for (k, &z) in g.z_nodes().iter().enumerate() {
        let j = ((z / hr) as usize).min(zr.len() - 2);
        let th = (z - zr[j]) / hr;
        let r = ur[j] * (1.0 - th) + ur[j + 1] * th;
        for i in 0..4 {
            err = err.max((u.values()[(i, k)] - r).abs());
        }
    }
    assert!(err < 1e-6, "max deviation {err:e}");
}

fn shear_bump_traces(nx: usize, t_final: f64) -> WallTraces {
    let p = SimParams::default();
    let g = Arc::new(Grid2D::new(nx, nx + 1, LX, 4.0, 1.5).unwrap());
    let s = make_initial_data(&InitialSpec::shear_bump(0.1, 0.1), &g, &p).unwrap();
    let traj = solve_euler(&s, t_final, &p).unwrap();
    extract_traces(&traj, None).unwrap()
}

#[test]
fn shear_bump_layer_self_converges_in_z() {
    let t_final = 0.25;
    let tr = shear_bump_traces(64, t_final);
    let p = SimParams::default();
    let finals: Vec<(Arc<BLGrid>, Array2<f64>)> = [49, 97, 193, 385]
        .iter()
        .map(|&nz| {
            let g = bl(64, nz);
            let sol = solve_prandtl_on(&g, &tr, t_final, &p, None).unwrap();
            (g, sol.up0.last().unwrap().values().clone())
        })
        .collect();
    // Differences on the coarse nodes shared by every level.
    let coarse = |a: &Array2<f64>, stride: usize| {
        Array2::from_shape_fn((64, 49), |(i, k)| a[(i, k * stride)])
    };
    let d: Vec<f64> = (0..3)
        .map(|l| {
            let a = coarse(&finals[l].1, 1 << l);
            let b = coarse(&finals[l + 1].1, 1 << (l + 1));
            l2(&finals[0].0, &(a - b))
        })
        .collect();
    let orders = common::orders(&d);
    assert!(*orders.last().unwrap() >= 1.9, "differences {d:?} orders {orders:?}");
}

#[test]
fn shear_bump_layer_decays_and_keeps_wall_value() {
    let t_final = 0.25;
    let tr = shear_bump_traces(32, t_final);
    let g = bl(32, 192);
    let sol = solve_prandtl_on(&g, &tr, t_final, &SimParams::default(), None).unwrap();
    let umax = tr.u_bar.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for (n, f) in sol.up0.iter().enumerate() {
        for i in 0..32 {
            assert!((f.values()[(i, 0)] + tr.u_bar[(n, i)]).abs() <= 1e-12);
        }
        for (k, &z) in g.z_nodes().iter().enumerate() {
            for i in 0..32 {
                assert!(f.values()[(i, k)].abs() <= umax * (-z * z / 8.0).exp() + 1e-14);
            }
        }
        assert!(f.tail_ratio() < 1e-8);
    }
}

#[test]
fn divergence_identity_is_second_order() {
    let r = divergence_residuals();
    let orders = common::orders(&r);
    assert!(orders.iter().all(|&p| p > 1.9), "residuals {r:?} orders {orders:?}");
}

/// Outer traces and an analytic first-order outer corrector.
fn synthetic_traces(times: &[f64], nx: usize, scale: f64) -> WallTraces {
    let mut tr = common::layer::full::OUTER.traces(times, nx);
    tr.dudy_bar = sample(times, nx, |_, x| 0.2 * x.cos());
    tr.d2vdy2_bar = sample(times, nx, |_, x| -0.1 * x.sin());
    let s = |f: fn(f64, f64) -> f64| sample(times, nx, f).mapv(|v| scale * v);
    tr.corrector = Some(CorrectorTraces {
        u1_bar: s(|t, x| t * (2.0 * x).cos()),
        rho1_bar: s(|t, x| 0.3 * t * x.sin()),
        v1_bar: s(|t, x| -0.1 * t * x.cos()),
        dvdy1_bar: s(|t, x| 0.2 * t * x.sin()),
        dxu1_bar: s(|t, x| -2.0 * t * (2.0 * x).sin()),
        dxv1_bar: s(|t, x| 0.1 * t * x.sin()),
    });
    tr
}

fn corrector_run(scale: f64) -> PrandtlSolution {
    let t_final = 0.1;
    let times = uniform(20, t_final);
    let tr = synthetic_traces(&times, 32, scale);
    let p = SimParams::default();
    let sol0 = solve_prandtl_on(&bl(32, 96), &tr, t_final, &p, None).unwrap();
    solve_prandtl_corrector(&sol0, &tr, t_final, &p).unwrap()
}

#[test]
fn corrector_is_affine_in_corrector_traces() {
    let base = corrector_run(0.0);
    let one = corrector_run(1.0);
    let three = corrector_run(3.0);
    let n = base.times.len() - 1;
    let get = |s: &PrandtlSolution| {
        (
            s.up1.as_ref().unwrap()[n].values().clone(),
            s.vp2.as_ref().unwrap()[n].values().clone(),
        )
    };
    let (b_u, b_v) = get(&base);
    let (o_u, o_v) = get(&one);
    let (t_u, t_v) = get(&three);
    let du = (&t_u - &b_u) - (&o_u - &b_u) * 3.0;
    let dv = (&t_v - &b_v) - (&o_v - &b_v) * 3.0;
    let scale = (&o_u - &b_u).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    assert!(scale > 1e-3);
    assert!(du.iter().all(|v| v.abs() < 1e-12 * scale.max(1.0)));
    assert!(dv.iter().all(|v| v.abs() < 1e-12 * scale.max(1.0)));
    let u1bar = &one.up1.as_ref().unwrap()[n];
    for i in 0..32 {
        let x = i as f64 * u1bar.grid().dx();
        assert!((u1bar.values()[(i, 0)] + 0.1 * (2.0 * x).cos()).abs() <= 1e-12);
    }
}

#[test]
fn corrector_wall_value_of_vp2_uses_closed_formula() {
    let one = corrector_run(1.0);
    let wall = one.vp2_wall.as_ref().unwrap();
    for (n, f) in one.vp2.as_ref().unwrap().iter().enumerate() {
        for i in 0..32 {
            assert!((f.values()[(i, 0)] - wall[(n, i)]).abs() < 1e-14);
        }
        assert!(f.values().column(f.grid().nz() - 1).iter().all(|v| v.abs() < 1e-10));
    }
}

#[test]
fn homogeneous_corrector_is_zero() {
    let times = uniform(10, 0.1);
    let mut tr = WallTraces::rest(times.clone(), 16, LX);
    tr.corrector = Some(zero_corrector(times.len(), 16));
    let p = SimParams::default();
    let sol0 = solve_prandtl_on(&bl(16, 64), &tr, 0.1, &p, None).unwrap();
    let sol = solve_prandtl_corrector(&sol0, &tr, 0.1, &p).unwrap();
    assert!(sol.up1.unwrap().iter().all(|f| f.max_abs() == 0.0));
    assert!(sol.vp2.unwrap().iter().all(|f| f.max_abs() == 0.0));
}

/// Rest outer flow, zero leading-order layer: the corrector reduces to a
/// heat equation with wall value `-U1`, `U1 = t sin x / 2`.
#[test]
fn corrector_diffusion_reduction_converges_at_second_order() {
    let t_final = 0.2;
    let rho = 1.25;
    let mut errs = vec![];
    for (nz, nt) in [(48, 10), (96, 20), (192, 40)] {
        let g = bl(16, nz);
        let times = uniform(nt, t_final);
        let mut tr = WallTraces::rest(times.clone(), 16, LX);
        tr.rho_bar.fill(rho);
        let mut c = zero_corrector(times.len(), 16);
        c.u1_bar = sample(&times, 16, |t, x| 0.5 * t * x.sin());
        c.dxu1_bar = sample(&times, 16, |t, x| 0.5 * t * x.cos());
        tr.corrector = Some(c);
        let p = SimParams::default();
        let sol0 = solve_prandtl_on(&g, &tr, t_final, &p, None).unwrap();
        let src = |t: f64, x: f64, z: f64| {
            let gz = (-z * z).exp();
            -0.5 * x.sin() * gz + 0.5 * t * x.sin() * (4.0 * z * z - 2.0) * gz / rho
        };
        let sol = solve_prandtl_corrector_with_source(&sol0, &tr, t_final, &p, Some(&src)).unwrap();
        let exact = BLField::from_fn(&g, |x, z| -0.5 * t_final * x.sin() * (-z * z).exp());
        errs.push(l2(&g, &(sol.up1.unwrap().last().unwrap().values() - exact.values())));
    }
    let orders = common::orders(&errs);
    assert!(orders.iter().all(|&p| p > 1.9), "errors {errs:?} orders {orders:?}");
}

#[test]
fn rho_p2_matches_synthetic_oracle() {
    let nx = 4;
    let g = bl(nx, 6001);
    let times = uniform(20, 0.02);
    let mut tr = WallTraces::rest(times.clone(), nx, LX);
    tr.corrector = Some(zero_corrector(times.len(), nx));
    let sol = PrandtlSolution {
        up0: times.iter().map(|_| BLField::zeros(&g)).collect(),
        vp1: times
            .iter()
            .map(|&t| BLField::from_fn(&g, |_, z| (-t - z * z).exp()))
            .collect(),
        vp1_wall: Array2::zeros((times.len(), nx)),
        up1: None,
        vp2: None,
        vp2_wall: None,
        rho_p2: None,
        dt: times[1],
        times: times.clone(),
    };
    let rho = compute_rho_p2(&sol, &tr, &SimParams::default()).unwrap();
    // P = d_t v - 2 d_zz v + v d_z v, integrated from z to infinity.
    let oracle = |t: f64, z: f64| {
        let e = (-t).exp();
        -e * gauss_tail(z) - 4.0 * z * e * (-z * z).exp() - 0.5 * e * e * (-2.0 * z * z).exp()
    };
    let mut err = 0.0_f64;
    for (n, f) in rho.iter().enumerate() {
        let ex = BLField::from_fn(&g, |_, z| oracle(times[n], z));
        err = err.max(max_diff(f.values(), ex.values()));
        assert!(f.values().column(g.nz() - 1).iter().all(|v| v.abs() < 1e-8));
    }
    assert!(err < 1e-6, "rho_p2 error {err:e}");
}

#[test]
fn rho_p2_of_zero_solution_is_zero() {
    let times = uniform(4, 0.1);
    let tr = WallTraces::rest(times.clone(), 8, LX);
    let sol = solve_prandtl_on(&bl(8, 64), &tr, 0.1, &SimParams::default(), None).unwrap();
    let rho = compute_rho_p2(&sol, &tr, &SimParams::default()).unwrap();
    assert!(rho.iter().all(|f| f.max_abs() == 0.0));
}
