//! Sweep harness: run the full pipeline per epsilon, measure the distance
//! between the Navier-Stokes solution and the expansion, fit rates.

mod export;
mod fit;

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::{construct_ansatz, ns_residual, residual_report, AnsatzBundle, ResidualNorms, ResidualReport};
use crate::cns::{solve_cns, CNSTrajectory};
use crate::error::{Error, Result};
use crate::field::State;
use crate::grid::{BLGridSpec, Grid2D, GridSpec};
use crate::initial::{make_initial_data, InitialSpec};
use crate::norms::{energy_diagnostics, gevrey_norm, EnergyConfig, EnergyDiagnostics, NormSpec};
use crate::params::SimParams;
use crate::timegrid;

pub use export::{
    read_results_json, results_csv_header, write_csv, write_lemma_jsonl, write_results_json,
    CSV_COLUMNS,
};
pub use fit::{fit_rate, fit_rows, RateFit};

/// Default sweep: three octaves of epsilon.
pub const DEFAULT_EPSILONS: [f64; 3] = [0.1, 0.05, 0.025];
/// Extra octave enabled by `--long`.
pub const LONG_EPSILON: f64 = 0.0125;

/// Norms a sweep reports. L2 and Linf are always computed; the proxy adds the
/// Gevrey-weighted error and the energy diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    Linf,
    GevreyProxy,
}

/// Grid rule shared by every epsilon: first wall spacing `epsilon / wall_factor`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub y_max: f64,
    pub wall_factor: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            nx: 64,
            ny: 161,
            lx: 2.0 * std::f64::consts::PI,
            y_max: 4.0,
            wall_factor: 16.0,
        }
    }
}

/// Explicit grid for one epsilon, replacing the rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    pub epsilon: f64,
    pub grid: GridSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Strictly decreasing, all positive.
    pub epsilons: Vec<f64>,
    pub scenario: InitialSpec,
    pub t_final: f64,
    pub params: SimParams,
    pub grid: SweepGrid,
    pub grid_overrides: Vec<GridOverride>,
    pub bl: BLGridSpec,
    pub norms: Vec<NormKind>,
    /// Residual norms are taken over `y <= y_window`.
    pub y_window: f64,
    pub energy: EnergyConfig,
    /// Seed of the randomized lemma corpora.
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            epsilons: DEFAULT_EPSILONS.to_vec(),
            scenario: InitialSpec::shear_bump(0.1, 0.1),
            t_final: 0.25,
            params: SimParams::default(),
            grid: SweepGrid::default(),
            grid_overrides: Vec::new(),
            bl: BLGridSpec::default(),
            norms: vec![NormKind::L2, NormKind::Linf, NormKind::GevreyProxy],
            y_window: 2.0,
            energy: EnergyConfig::default(),
            seed: 20240601,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Appends the `--long` octave when missing.
    pub fn with_long(mut self) -> Self {
        if !self.epsilons.iter().any(|&e| e == LONG_EPSILON) {
            self.epsilons.push(LONG_EPSILON);
        }
        self
    }

    /// Parameters actually used for `epsilon`.
    pub fn params_for(&self, epsilon: f64) -> SimParams {
        SimParams {
            t_final: self.t_final,
            ..self.params.with_epsilon(epsilon)
        }
    }

    pub fn grid_for(&self, epsilon: f64) -> Result<Arc<Grid2D>> {
        let g = match self.grid_overrides.iter().find(|o| o.epsilon == epsilon) {
            Some(o) => Grid2D::from_spec(&o.grid)?,
            None => {
                let s = &self.grid;
                if !(s.wall_factor > 0.0) {
                    return Err(Error::Config("wall_factor must be positive".into()));
                }
                Grid2D::with_wall_spacing(s.nx, s.ny, s.lx, s.y_max, epsilon / s.wall_factor)?
            }
        };
        g.check_resolves_layer(epsilon)?;
        Ok(Arc::new(g))
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::Config("no epsilon values".into()));
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::Config("epsilon values must be positive".into()));
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("epsilon values must be strictly decreasing".into()));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.t_final)));
        }
        if !(self.y_window > 0.0) {
            return Err(Error::Config("y_window must be positive".into()));
        }
        self.params_for(self.epsilons[0]).validate()?;
        for &e in &self.epsilons {
            self.grid_for(e)?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// L2 and sup norms of the three component differences.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub rho_l2: f64,
    pub u_l2: f64,
    pub v_l2: f64,
    pub rho_linf: f64,
    pub u_linf: f64,
    pub v_linf: f64,
}

impl ErrorNorms {
    pub fn between(a: &State, b: &State) -> Self {
        let d = a.diff(b);
        ErrorNorms {
            rho_l2: d.rho.l2_norm(),
            u_l2: d.u.l2_norm(),
            v_l2: d.v.l2_norm(),
            rho_linf: d.rho.max_abs(),
            u_linf: d.u.max_abs(),
            v_linf: d.v.max_abs(),
        }
    }

    /// Componentwise maximum.
    pub fn sup(self, o: ErrorNorms) -> Self {
        ErrorNorms {
            rho_l2: self.rho_l2.max(o.rho_l2),
            u_l2: self.u_l2.max(o.u_l2),
            v_l2: self.v_l2.max(o.v_l2),
            rho_linf: self.rho_linf.max(o.rho_linf),
            u_linf: self.u_linf.max(o.u_linf),
            v_linf: self.v_linf.max(o.v_linf),
        }
    }
}

/// Distances at one stored level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeErrors {
    pub t: f64,
    /// Against `(rho_e0, u_e0 + u_p0, v_e0 + eps v_p1)`.
    pub leading: ErrorNorms,
    /// Against the full composed ansatz.
    pub full: ErrorNorms,
    /// `max |u^eps - u_e0|`.
    pub euler_u_linf: f64,
}

pub fn time_errors(ns: &State, bundle: &AnsatzBundle, n: usize) -> TimeErrors {
    TimeErrors {
        t: ns.t,
        leading: ErrorNorms::between(ns, &bundle.leading[n]),
        full: ErrorNorms::between(ns, &bundle.composed[n]),
        euler_u_linf: ns.u.zip_with(&bundle.euler0.states[n].u, |a, b| a - b).max_abs(),
    }
}

pub struct PipelineOutput {
    pub ns: CNSTrajectory,
    pub ansatz: AnsatzBundle,
    pub errors: Vec<TimeErrors>,
    pub residual: Vec<ResidualReport>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> std::result::Result<T, StageError> {
    r.map_err(|e| StageError { stage: name, error: e })
}

/// Error tagged with the pipeline stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

/// Initial data, expansion, Navier-Stokes run and the per-level distances.
pub fn run_pipeline(cfg: &SweepConfig, epsilon: f64) -> std::result::Result<PipelineOutput, StageError> {
    stage("config", cfg.validate())?;
    let p = cfg.params_for(epsilon);
    let grid = stage("grid", cfg.grid_for(epsilon))?;
    let init = stage("initial", make_initial_data(&cfg.scenario, &grid, &p))?;
    let ansatz = stage("ansatz", construct_ansatz(&init, &cfg.bl, &p, epsilon, cfg.t_final))?;
    let ns = stage("navier-stokes", solve_cns(&init, epsilon, cfg.t_final, &p))?;
    stage("align", timegrid::check_same(&ns.times(), &ansatz.times()))?;
    let errors = ns
        .states
        .iter()
        .enumerate()
        .map(|(n, s)| time_errors(s, &ansatz, n))
        .collect();
    let res = stage("residual", ns_residual(&ansatz, &p))?;
    let residual = residual_report(epsilon, &res, cfg.y_window);
    Ok(PipelineOutput {
        ns,
        ansatz,
        errors,
        residual,
    })
}

/// What the outer flow alone misses at the horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerBaseline {
    pub epsilon: f64,
    /// `max |u^eps(T) - u_e0(T)|` over the grid.
    pub u_linf: f64,
    /// `max_x |u_e0(T, x, 0)|`: a lower bound for `u_linf`, since `u^eps` vanishes on the wall.
    pub wall_trace: f64,
    /// Same as `u_linf` but over `y <= 10 eps`.
    pub near_wall_u_linf: f64,
}

pub fn baseline_from(ns: &State, euler: &State, epsilon: f64) -> EulerBaseline {
    let d = ns.u.zip_with(&euler.u, |a, b| a - b);
    EulerBaseline {
        epsilon,
        u_linf: d.max_abs(),
        wall_trace: euler.u.wall().iter().fold(0.0, |m, v| m.max(v.abs())),
        near_wall_u_linf: d.max_abs_below(10.0 * epsilon),
    }
}

/// Navier-Stokes against the outer flow alone, without any layer.
pub fn euler_only_baseline(cfg: &SweepConfig, epsilon: f64) -> std::result::Result<EulerBaseline, StageError> {
    stage("config", cfg.validate())?;
    let p = cfg.params_for(epsilon);
    let grid = stage("grid", cfg.grid_for(epsilon))?;
    let init = stage("initial", make_initial_data(&cfg.scenario, &grid, &p))?;
    let euler = stage("euler", crate::euler::solve_euler(&init, cfg.t_final, &p))?;
    let ns = stage("navier-stokes", solve_cns(&init, epsilon, cfg.t_final, &p))?;
    Ok(baseline_from(ns.last(), euler.last(), epsilon))
}

/// Summary of the energy proxy over one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub e_max: f64,
    pub d_max: f64,
    pub k_used: usize,
}

/// One epsilon of a sweep. Error columns are suprema over the stored levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub leading: ErrorNorms,
    pub full: ErrorNorms,
    pub euler: EulerBaseline,
    /// Componentwise supremum over levels of the windowed residual norms.
    pub residual: ResidualNorms,
    /// Gevrey proxy of the leading-order `u` error at the horizon.
    pub gevrey_u: Option<f64>,
    pub energy: Option<EnergySummary>,
    /// Seconds; kept out of the CSV so reruns are byte-identical.
    pub wallclock: f64,
}

/// Order of the Gevrey column.
pub const GEVREY_COLUMN_ORDER: usize = 2;

fn sup_residual(r: &[ResidualReport]) -> ResidualNorms {
    let mut out = ResidualNorms {
        rho_l2: 0.0,
        u_l2: 0.0,
        v_l2: 0.0,
        rho_linf: 0.0,
        u_linf: 0.0,
        v_linf: 0.0,
        total_l2: 0.0,
    };
    for x in r.iter().map(|r| &r.norms) {
        out.rho_l2 = out.rho_l2.max(x.rho_l2);
        out.u_l2 = out.u_l2.max(x.u_l2);
        out.v_l2 = out.v_l2.max(x.v_l2);
        out.rho_linf = out.rho_linf.max(x.rho_linf);
        out.u_linf = out.u_linf.max(x.u_linf);
        out.v_linf = out.v_linf.max(x.v_linf);
        out.total_l2 = out.total_l2.max(x.total_l2);
    }
    out
}

/// Error trajectory `(rho^eps - rho_a, u^eps - u_a, v^eps - v_a)`.
pub fn error_trajectory(out: &PipelineOutput) -> Vec<State> {
    out.ns
        .states
        .iter()
        .zip(&out.ansatz.composed)
        .map(|(n, a)| n.diff(a))
        .collect()
}

pub fn energy_of(out: &PipelineOutput, cfg: &SweepConfig) -> Result<EnergyDiagnostics> {
    let p = cfg.params_for(out.ns.epsilon);
    energy_diagnostics(&error_trajectory(out), &p, out.ns.epsilon, &cfg.energy)
}

/// Reduce a pipeline run to its sweep row.
pub fn summarize(cfg: &SweepConfig, out: &PipelineOutput, wallclock: f64) -> Result<SweepRow> {
    let eps = out.ns.epsilon;
    let sup = |f: fn(&TimeErrors) -> ErrorNorms| {
        out.errors.iter().map(f).fold(ErrorNorms::default(), ErrorNorms::sup)
    };
    let proxy = cfg.norms.contains(&NormKind::GevreyProxy);
    let (gevrey_u, energy) = if proxy {
        let p = cfg.params_for(eps);
        let last = out.ns.last();
        let lead = out.ansatz.leading.last().expect("non-empty");
        let spec = NormSpec::from_params(&p, GEVREY_COLUMN_ORDER, 0.0, last.t);
        let spec = spec.with_mu(0.5 * spec.radius_limit());
        let g = gevrey_norm(&last.u.zip_with(&lead.u, |a, b| a - b), &spec)?;
        let e = energy_of(out, cfg)?;
        let summary = EnergySummary {
            e_max: e.e_series.iter().copied().fold(0.0, f64::max),
            d_max: e.d_series.iter().copied().fold(0.0, f64::max),
            k_used: e.k_used,
        };
        (Some(g), Some(summary))
    } else {
        (None, None)
    };
    Ok(SweepRow {
        epsilon: eps,
        leading: sup(|e| e.leading),
        full: sup(|e| e.full),
        euler: baseline_from(out.ns.last(), out.ansatz.euler0.last(), eps),
        residual: horizon_residual(&out.residual),
        gevrey_u,
        energy,
        wallclock,
    })
}

/// Why an epsilon row produced no numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowFailure {
    pub epsilon: f64,
    pub stage: String,
    /// `config` or `numerical`.
    pub kind: String,
    pub message: String,
    /// Time of the failure when the solver reported one.
    pub t: Option<f64>,
}

impl RowFailure {
    fn new(epsilon: f64, e: &StageError) -> Self {
        let t = match &e.error {
            Error::Aborted { t, .. } | Error::BlowUp { t, .. } | Error::NonFinite { t, .. } => Some(*t),
            Error::DensityFloor { t, .. } | Error::TailNotConverged { t, .. } => Some(*t),
            _ => None,
        };
        RowFailure {
            epsilon,
            stage: e.stage.into(),
            kind: if e.error.is_numerical() { "numerical" } else { "config" }.into(),
            message: e.error.to_string(),
            t,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub code_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub failures: Vec<RowFailure>,
    pub slopes: Vec<RateFit>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn from_rows(cfg: &SweepConfig, rows: Vec<SweepRow>, failures: Vec<RowFailure>) -> Self {
        let slopes = fit_rows(&rows);
        SweepResult {
            config: cfg.clone(),
            rows,
            failures,
            slopes,
            provenance: Provenance {
                config_hash: cfg.hash(),
                code_version: env!("CARGO_PKG_VERSION").into(),
            },
        }
    }

    pub fn slope(&self, column: &str) -> Option<&RateFit> {
        self.slopes.iter().find(|f| f.column == column)
    }
}

/// One row, with failures isolated.
pub fn run_row(cfg: &SweepConfig, epsilon: f64) -> std::result::Result<SweepRow, RowFailure> {
    run_row_with(cfg, epsilon, &|_| Ok(()))
}

/// Hook that sees each finished pipeline run, e.g. to save checkpoints.
pub type OutputHook<'a> = &'a (dyn Fn(&PipelineOutput) -> Result<()> + Sync);

pub fn run_row_with(
    cfg: &SweepConfig,
    epsilon: f64,
    hook: OutputHook,
) -> std::result::Result<SweepRow, RowFailure> {
    let t0 = Instant::now();
    let out = run_pipeline(cfg, epsilon).map_err(|e| RowFailure::new(epsilon, &e))?;
    let wall = t0.elapsed().as_secs_f64();
    let fail = |stage, error| RowFailure::new(epsilon, &StageError { stage, error });
    let row = summarize(cfg, &out, wall).map_err(|e| fail("summary", e))?;
    hook(&out).map_err(|e| fail("output", e))?;
    Ok(row)
}

/// Run every epsilon on `jobs` worker threads. Rows come back in config
/// order; a failed row is recorded and the others continue.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepResult> {
    run_sweep_with(cfg, jobs, &|_| Ok(()))
}

pub fn run_sweep_with(cfg: &SweepConfig, jobs: usize, hook: OutputHook) -> Result<SweepResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| {
        cfg.epsilons
            .par_iter()
            .map(|&e| {
                log::info!("epsilon {e}: start");
                let r = run_row_with(cfg, e, hook);
                match &r {
                    Ok(row) => log::info!("epsilon {e}: done in {:.1}s", row.wallclock),
                    Err(f) => log::warn!("epsilon {e}: failed in {}: {}", f.stage, f.message),
                }
                r
            })
            .collect()
    });
    let (mut rows, mut failures) = (Vec::new(), Vec::new());
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(f) => failures.push(f),
        }
    }
    Ok(SweepResult::from_rows(cfg, rows, failures))
}

/// Windowed residual norms of the composed ansatz per epsilon; no
/// Navier-Stokes solve.
pub fn residual_sweep(cfg: &SweepConfig) -> Result<Vec<(f64, Vec<ResidualReport>)>> {
    cfg.validate()?;
    cfg.epsilons
        .iter()
        .map(|&eps| {
            let p = cfg.params_for(eps);
            let grid = cfg.grid_for(eps)?;
            let init = make_initial_data(&cfg.scenario, &grid, &p)?;
            let b = construct_ansatz(&init, &cfg.bl, &p, eps, cfg.t_final)?;
            let r = ns_residual(&b, &p)?;
            Ok((eps, residual_report(eps, &r, cfg.y_window)))
        })
        .collect()
}

/// Supremum over levels of the windowed total residual. Level 0 carries the
/// startup layer of data that are not first-order compatible, so this does
/// not shrink like `eps^2`; see [`horizon_residual`].
pub fn residual_sup(r: &[ResidualReport]) -> f64 {
    sup_residual(r).total_l2
}

/// Windowed residual norms at the last level (the horizon `T`), the value
/// carried by the `R_*` columns.
pub fn horizon_residual(r: &[ResidualReport]) -> ResidualNorms {
    r.last().map(|x| x.norms.clone()).unwrap_or_else(|| sup_residual(&[]))
}
