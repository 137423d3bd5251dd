use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use zerovisc::ansatz::{construct_ansatz, ns_residual, residual_report};
use zerovisc::checkpoint::{Checkpoint, Content};
use zerovisc::cns::solve_cns;
use zerovisc::euler::{self, extract_traces};
use zerovisc::harness::{run_sweep_with, write_lemma_jsonl, PipelineOutput, SweepConfig};
use zerovisc::norms::{hardy_corpus, product_corpus, recovery_corpus, LemmaRecord};
use zerovisc::prandtl::solve_prandtl_on;
use zerovisc::{make_initial_data, BLGrid, BLGridSpec, Error, Grid2D, RunConfig, State};

use crate::{Common, Failure};

type Outcome = Result<(), Failure>;

fn io<T>(r: std::io::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Config(format!("i/o: {e}")))
}

fn write_json(path: &Path, v: &impl Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Config(e.to_string()))?;
    io(fs::write(path, text + "\n"))
}

/// Run configuration from `--config`, or the sweep defaults at `params.epsilon`.
fn run_config(c: &Common) -> Result<RunConfig, Failure> {
    match &c.config {
        Some(p) => Ok(RunConfig::from_json(&io(fs::read_to_string(p))?)?),
        None => {
            let sweep = SweepConfig::default();
            let params = sweep.params_for(sweep.params.epsilon);
            let grid = sweep.grid_for(params.epsilon)?;
            Ok(RunConfig {
                params,
                grid: grid.spec(),
                initial: sweep.scenario,
            })
        }
    }
}

fn sweep_config(c: &Common) -> Result<SweepConfig, Failure> {
    let cfg = match &c.config {
        Some(p) => SweepConfig::from_json(&io(fs::read_to_string(p))?)?,
        None => SweepConfig::default(),
    };
    let cfg = if c.long { cfg.with_long() } else { cfg };
    cfg.validate()?;
    Ok(cfg)
}

fn prepare(c: &Common) -> Result<(RunConfig, State), Failure> {
    let cfg = run_config(c)?;
    io(fs::create_dir_all(&c.out))?;
    let grid = Arc::new(Grid2D::from_spec(&cfg.grid)?);
    let init = make_initial_data(&cfg.initial, &grid, &cfg.params)?;
    Ok((cfg, init))
}

#[derive(Serialize)]
struct Diagnostics<'a> {
    command: &'a str,
    error: String,
    t: Option<f64>,
    last_good_checkpoint: Option<String>,
}

/// Records a numerical failure in `out/diagnostics.json`, with the last good
/// state when the solver kept one.
fn numerical(out: &Path, command: &str, e: Error) -> Failure {
    if !e.is_numerical() {
        return e.into();
    }
    let (t, last) = match &e {
        Error::Aborted { t, last_good, .. } => {
            let path = out.join("last_good.zvck");
            let saved = Checkpoint::from_states(Content::NavierStokes, std::slice::from_ref(last_good), None)
                .and_then(|ck| ck.save(&path))
                .is_ok();
            (Some(*t), saved.then(|| path.display().to_string()))
        }
        _ => (None, None),
    };
    let d = Diagnostics {
        command,
        error: e.to_string(),
        t,
        last_good_checkpoint: last,
    };
    let _ = fs::create_dir_all(out);
    let _ = write_json(&out.join("diagnostics.json"), &d);
    Failure::Numerical(e.to_string())
}

pub fn solve_euler(c: &Common) -> Outcome {
    let (cfg, init) = prepare(c)?;
    let traj = euler::solve_euler(&init, cfg.params.t_final, &cfg.params).map_err(|e| numerical(&c.out, "solve-euler", e))?;
    Checkpoint::from_states(Content::Euler, &traj.states, None)?.save(&c.out.join("euler.zvck"))?;
    log::info!("wrote {} levels to {}", traj.states.len(), c.out.join("euler.zvck").display());
    Ok(())
}

pub fn solve_prandtl(c: &Common) -> Outcome {
    let (cfg, init) = prepare(c)?;
    let p = &cfg.params;
    let run = || -> zerovisc::Result<_> {
        let euler = euler::solve_euler(&init, p.t_final, p)?;
        let traces = extract_traces(&euler, None)?;
        let grid = Arc::new(BLGrid::from_spec(init.grid().nx(), init.grid().lx(), &BLGridSpec::default())?);
        solve_prandtl_on(&grid, &traces, p.t_final, p, None)
    };
    let sol = run().map_err(|e| numerical(&c.out, "solve-prandtl", e))?;
    let ck = Checkpoint::from_layer_fields(
        &[("up0".into(), &sol.up0), ("vp1".into(), &sol.vp1)],
        &sol.times,
    )?;
    ck.save(&c.out.join("prandtl.zvck"))?;
    log::info!("wrote {} layer levels", sol.times.len());
    Ok(())
}

pub fn build_ansatz(c: &Common) -> Outcome {
    let (cfg, init) = prepare(c)?;
    let p = &cfg.params;
    let b = construct_ansatz(&init, &BLGridSpec::default(), p, p.epsilon, p.t_final)
        .map_err(|e| numerical(&c.out, "build-ansatz", e))?;
    ansatz_checkpoint(&b, 1)?.save(&c.out.join("ansatz.zvck"))?;
    let res = ns_residual(&b, p)?;
    write_json(&c.out.join("residual.json"), &residual_report(p.epsilon, &res, 2.0))?;
    log::info!("ansatz at epsilon {} written", p.epsilon);
    Ok(())
}

/// Composed ansatz, leading-order pair and outer flow on every `stride`-th level.
pub fn ansatz_checkpoint(b: &zerovisc::ansatz::AnsatzBundle, stride: usize) -> zerovisc::Result<Checkpoint> {
    let idx: Vec<usize> = (0..b.composed.len()).step_by(stride.max(1)).collect();
    fn pick<'a>(idx: &[usize], f: impl Fn(usize) -> &'a zerovisc::Field2D) -> Vec<&'a zerovisc::Field2D> {
        idx.iter().map(|&n| f(n)).collect()
    }
    let fields = vec![
        ("rho".to_string(), pick(&idx, |n| &b.composed[n].rho)),
        ("u".to_string(), pick(&idx, |n| &b.composed[n].u)),
        ("v".to_string(), pick(&idx, |n| &b.composed[n].v)),
        ("u_lead".to_string(), pick(&idx, |n| &b.leading[n].u)),
        ("v_lead".to_string(), pick(&idx, |n| &b.leading[n].v)),
        ("rho_e".to_string(), pick(&idx, |n| &b.euler0.states[n].rho)),
        ("u_e".to_string(), pick(&idx, |n| &b.euler0.states[n].u)),
    ];
    let times: Vec<f64> = idx.iter().map(|&n| b.composed[n].t).collect();
    Checkpoint::from_fields(Content::Ansatz, &fields, &times, Some(b.epsilon))
}

pub fn solve_ns(c: &Common) -> Outcome {
    let (cfg, init) = prepare(c)?;
    let p = &cfg.params;
    let traj = solve_cns(&init, p.epsilon, p.t_final, p).map_err(|e| numerical(&c.out, "solve-ns", e))?;
    Checkpoint::from_states(Content::NavierStokes, &traj.states, Some(p.epsilon))?
        .save(&c.out.join("ns.zvck"))?;
    write_json(&c.out.join("wall_flux.json"), &traj.wall_flux_log)?;
    Ok(())
}

/// Stored levels kept in sweep checkpoints.
const SWEEP_CHECKPOINT_LEVELS: usize = 11;

pub fn sweep(c: &Common) -> Outcome {
    let cfg = sweep_config(c)?;
    io(fs::create_dir_all(&c.out))?;
    write_json(&c.out.join("config.json"), &cfg)?;
    let out = c.out.clone();
    let hook = move |run: &PipelineOutput| save_run_checkpoints(run, &out);
    let result = run_sweep_with(&cfg, c.jobs, &hook)?;
    result.export(&c.out)?;
    write_lemma_jsonl(&lemma_records(cfg.seed)?, &c.out.join("lemmas.jsonl"))?;
    for s in &result.slopes {
        log::info!("{:<28} slope {:>7.3} +/- {:.3}", s.column, s.slope, s.half_width);
    }
    if result.failures.is_empty() {
        Ok(())
    } else {
        write_json(&c.out.join("diagnostics.json"), &result.failures)?;
        Err(Failure::Numerical(format!("{} epsilon row(s) failed", result.failures.len())))
    }
}

/// `ns_eps{e}.zvck` and `ansatz_eps{e}.zvck` on evenly spaced levels.
fn save_run_checkpoints(run: &PipelineOutput, out: &Path) -> zerovisc::Result<()> {
    let eps = run.ns.epsilon;
    let n = run.ns.states.len();
    let stride = (n - 1).div_ceil(SWEEP_CHECKPOINT_LEVELS - 1).max(1);
    let ns: Vec<State> = run.ns.states.iter().step_by(stride).cloned().collect();
    Checkpoint::from_states(Content::NavierStokes, &ns, Some(eps))?.save(&out.join(format!("ns_eps{eps}.zvck")))?;
    ansatz_checkpoint(&run.ansatz, stride)?.save(&out.join(format!("ansatz_eps{eps}.zvck")))
}

/// Corpus sizes of the lemma suite.
pub const LEMMA_SAMPLES: usize = 100;

pub fn lemma_records(seed: u64) -> zerovisc::Result<Vec<LemmaRecord>> {
    let g = Arc::new(Grid2D::new(32, 161, 2.0 * std::f64::consts::PI, 4.0, 1.5)?);
    let g_small = Arc::new(Grid2D::new(32, 81, 2.0 * std::f64::consts::PI, 4.0, 1.5)?);
    let mut recs = hardy_corpus(&g, LEMMA_SAMPLES, seed);
    recs.extend(recovery_corpus(&g_small, LEMMA_SAMPLES, seed.wrapping_add(1), 4, 0.1)?);
    recs.extend(product_corpus(&g_small, LEMMA_SAMPLES, 7, 8, 0.005, 0.1)?);
    Ok(recs)
}

pub fn verify_lemmas(c: &Common) -> Outcome {
    let seed = match &c.config {
        Some(_) => sweep_config(c)?.seed,
        None => SweepConfig::default().seed,
    };
    io(fs::create_dir_all(&c.out))?;
    let recs = lemma_records(seed)?;
    let path = c.out.join("lemmas.jsonl");
    write_lemma_jsonl(&recs, &path)?;
    let mut failed = 0;
    for lemma in ["hardy", "recovery", "product"] {
        let sel: Vec<&LemmaRecord> = recs.iter().filter(|r| r.lemma == lemma).collect();
        let worst = sel.iter().map(|r| r.ratio).fold(0.0, f64::max);
        let bad = sel.iter().filter(|r| !r.pass).count();
        failed += bad;
        println!("{lemma:<9} samples {:>3}  worst ratio {worst:.6e}  failures {bad}", sel.len());
    }
    if failed > 0 {
        write_json(&c.out.join("diagnostics.json"), &recs.iter().filter(|r| !r.pass).collect::<Vec<_>>())?;
        return Err(Failure::Numerical(format!("{failed} lemma sample(s) failed")));
    }
    Ok(())
}
