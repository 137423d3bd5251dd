//! Acceptance suite. Every criterion prints one `PASS`/`FAIL` line straight
//! to stdout (so it shows even when the harness captures output) and then
//! asserts. Tolerances are pinned below.

mod common;

use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use common::{checks, layer, orders};
use zerovisc::harness::{
    energy_of, fit_rate, horizon_residual, residual_sup, residual_sweep, run_sweep_with,
    PipelineOutput, SweepConfig, SweepResult,
};
use zerovisc::norms::{hardy_corpus, product_corpus, recovery_corpus, EnergyDiagnostics, LemmaRecord, PRODUCT_BOUND};
use zerovisc::Grid2D;

const L2_SLOPE_MIN: f64 = 0.8;
const LINF_SLOPE_MIN: f64 = 0.7;
const RESIDUAL_SLOPE: f64 = 2.0;
const RESIDUAL_SLOPE_TOL: f64 = 0.4;
/// The residual floor from x truncation of the outer solve sits near
/// 9e-5 at nx = 64; nx = 128 keeps it below the eps = 0.025 signal.
const RESIDUAL_NX: usize = 128;
const WALL_TRACE_SLACK: f64 = 1e-3;
const MMS_ORDER_MIN: f64 = 1.9;
const HEAT_REL_L2_MAX: f64 = 1e-3;
const LEMMA_SAMPLES: usize = 100;
const WALL_EXACT_MAX: f64 = 1e-10;
const DIVERGENCE_ORDER_MIN: f64 = 1.9;
const LINEARITY_MAX: f64 = 1e-12;
const ENERGY_EPSILON: f64 = 0.05;
const ENERGY_FACTOR: f64 = 4.0;
/// The early-time plateau is `max E` over `0 < t <= T / 20`.
const PLATEAU_FRACTION: f64 = 0.05;

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn report(name: &str, pass: bool, detail: impl std::fmt::Display) {
    let mut out = std::io::stdout().lock();
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "acceptance [{tag}] {name}: {detail}");
}

/// The default sweep, run once and shared by every criterion that needs it.
struct Sweep {
    result: SweepResult,
    /// Largest composed-ansatz wall trace `(|u_a|, |v_a|)` over all levels and eps.
    wall: (f64, f64),
    energy: Option<EnergyDiagnostics>,
}

fn sweep() -> &'static Sweep {
    static CELL: OnceLock<Sweep> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = SweepConfig::default();
        let wall = Mutex::new((0.0_f64, 0.0_f64));
        let energy = Mutex::new(None);
        let hook = |out: &PipelineOutput| {
            let tr = |f: &zerovisc::Field2D| f.wall().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let mut w = wall.lock().unwrap();
            for s in &out.ansatz.composed {
                w.0 = w.0.max(tr(&s.u));
                w.1 = w.1.max(tr(&s.v));
            }
            if out.ns.epsilon == ENERGY_EPSILON {
                *energy.lock().unwrap() = Some(energy_of(out, &cfg)?);
            }
            Ok(())
        };
        let result = run_sweep_with(&cfg, 3, &hook).unwrap();
        Sweep {
            result,
            wall: wall.into_inner().unwrap(),
            energy: energy.into_inner().unwrap(),
        }
    })
}

#[test]
fn convergence_rate() {
    let s = sweep();
    assert!(s.result.failures.is_empty(), "{:?}", s.result.failures);
    let mut pass = true;
    let mut parts = Vec::new();
    for (col, min) in [
        ("err_u_L2", L2_SLOPE_MIN),
        ("err_rho_L2", L2_SLOPE_MIN),
        ("err_u_Linf", LINF_SLOPE_MIN),
        ("err_rho_Linf", LINF_SLOPE_MIN),
    ] {
        let f = s.result.slope(col).expect("fitted");
        pass &= f.slope >= min;
        parts.push(format!("{col} {:.3}+/-{:.3} (>= {min})", f.slope, f.half_width));
    }
    report("convergence rate", pass, parts.join(", "));
    assert!(pass);
}

#[test]
fn boundary_layer_necessity() {
    let s = sweep();
    assert!(s.result.failures.is_empty(), "{:?}", s.result.failures);
    let rows = &s.result.rows;
    let mut pass = true;
    let mut parts = Vec::new();
    for r in rows {
        let ok = r.euler.u_linf >= r.euler.wall_trace - WALL_TRACE_SLACK;
        pass &= ok;
        parts.push(format!(
            "eps {}: euler-only {:.4e} vs trace {:.4e}",
            r.epsilon, r.euler.u_linf, r.euler.wall_trace
        ));
    }
    let ansatz: Vec<f64> = rows.iter().map(|r| r.leading.u_linf).collect();
    let decreasing = ansatz.windows(2).all(|w| w[1] < w[0]);
    pass &= decreasing;
    parts.push(format!("ansatz u Linf {} decreasing {decreasing}", sci(&ansatz)));
    report("boundary-layer necessity", pass, parts.join("; "));
    assert!(pass);
}

#[test]
fn residual_order() {
    let mut cfg = SweepConfig::default();
    cfg.grid.nx = RESIDUAL_NX;
    let sw = residual_sweep(&cfg).unwrap();
    let horizon: Vec<(f64, f64)> = sw.iter().map(|(e, r)| (*e, horizon_residual(r).total_l2)).collect();
    let sup: Vec<(f64, f64)> = sw.iter().map(|(e, r)| (*e, residual_sup(r))).collect();
    let fit = fit_rate(&horizon, "R_L2").expect("three points");
    let sup_fit = fit_rate(&sup, "R_L2_sup").expect("three points");
    let pass = (fit.slope - RESIDUAL_SLOPE).abs() <= RESIDUAL_SLOPE_TOL;
    report(
        "residual order",
        pass,
        format!(
            "R_L2 at T slope {:.3}+/-{:.3} (2 +/- {RESIDUAL_SLOPE_TOL}), values {}; \
             sup over levels incl. startup slope {:.3} (information)",
            fit.slope,
            fit.half_width,
            sci(&horizon.iter().map(|p| p.1).collect::<Vec<_>>()),
            sup_fit.slope
        ),
    );
    assert!(pass);
}

#[test]
fn scheme_verification() {
    let e = orders(&checks::euler_mms());
    let c = orders(&checks::cns_mms());
    let p = orders(&layer::full_operator_errors());
    let (heat, _) = checks::heat_benchmark();
    let ok = |o: &[f64]| o.iter().all(|&q| q >= MMS_ORDER_MIN);
    let pass = ok(&e) && ok(&c) && ok(&p) && heat < HEAT_REL_L2_MAX;
    report(
        "scheme verification",
        pass,
        format!(
            "MMS orders euler {e:.3?} cns {c:.3?} prandtl {p:.3?} (>= {MMS_ORDER_MIN}); \
             heat benchmark rel L2 {heat:.3e} (< {HEAT_REL_L2_MAX:e})"
        ),
    );
    assert!(pass);
}

#[test]
fn functional_inequalities() {
    let seed = SweepConfig::default().seed;
    let lx = 2.0 * std::f64::consts::PI;
    let g = Arc::new(Grid2D::new(32, 161, lx, 4.0, 1.5).unwrap());
    let g_small = Arc::new(Grid2D::new(32, 81, lx, 4.0, 1.5).unwrap());
    let hardy = hardy_corpus(&g, LEMMA_SAMPLES, seed);
    let recovery = recovery_corpus(&g_small, LEMMA_SAMPLES, seed + 1, 4, 0.1).unwrap();
    let product = product_corpus(&g_small, LEMMA_SAMPLES, 7, 8, 0.005, 0.1).unwrap();
    let worst = |r: &[LemmaRecord]| r.iter().map(|x| x.ratio).fold(0.0, f64::max);
    let all = |r: &[LemmaRecord]| r.len() == LEMMA_SAMPLES && r.iter().all(|x| x.pass);
    let pass = all(&hardy) && all(&recovery) && all(&product) && worst(&product) < PRODUCT_BOUND;
    report(
        "functional inequalities",
        pass,
        format!(
            "hardy worst {:.4} (<= 2 + 5 dy), recovery worst {:.4} (<= 1/e), product worst C {:.4e} (< {PRODUCT_BOUND:.4e})",
            worst(&hardy),
            worst(&recovery),
            worst(&product)
        ),
    );
    assert!(pass);
}

#[test]
fn structural_exactness() {
    let s = sweep();
    let (u, v) = s.wall;
    let div = layer::divergence_residuals();
    let div_orders = orders(&div);
    let (hom, add) = checks::linearity_defects();
    let pass = u <= WALL_EXACT_MAX
        && v <= WALL_EXACT_MAX
        && div_orders.iter().all(|&o| o >= DIVERGENCE_ORDER_MIN)
        && hom <= LINEARITY_MAX
        && add <= LINEARITY_MAX;
    report(
        "structural exactness",
        pass,
        format!(
            "wall |u_a| {u:.2e} |v_a| {v:.2e} (<= {WALL_EXACT_MAX:e}); divergence residual {} orders {div_orders:.3?}; \
             linearity defects {hom:.2e} {add:.2e} (<= {LINEARITY_MAX:e})",
            sci(&div)
        ),
    );
    assert!(pass);
}

#[test]
fn energy_boundedness() {
    let s = sweep();
    let e = s.energy.as_ref().expect("energy of the eps = 0.05 run");
    let t_final = SweepConfig::default().t_final;
    let plateau = e
        .times
        .iter()
        .zip(&e.e_series)
        .filter(|(t, _)| **t > 0.0 && **t <= PLATEAU_FRACTION * t_final + 1e-12)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    let e_max = e.max_e_between(0.0, t_final);
    let pass = plateau > 0.0 && e_max <= ENERGY_FACTOR * plateau;
    report(
        "energy boundedness",
        pass,
        format!(
            "eps {ENERGY_EPSILON}: max E {e_max:.3e}, plateau (0 < t <= {:.4}) {plateau:.3e}, ratio {:.2} (<= {ENERGY_FACTOR}), k used {}",
            PLATEAU_FRACTION * t_final,
            e_max / plateau,
            e.k_used
        ),
    );
    assert!(pass);
}
