//! Tables the plotting scripts read; no physics is recomputed here.

use std::fs;
use std::path::Path;

use zerovisc::checkpoint::Checkpoint;
use zerovisc::harness::{read_results_json, CSV_COLUMNS};
use zerovisc::norms::LemmaRecord;

use crate::{Common, Failure};

fn cfg_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

pub fn run(input: &Path, c: &Common) -> Result<(), Failure> {
    let text = fs::read_to_string(input.join("results.json"))
        .map_err(|e| cfg_err(format!("{}: {e}", input.join("results.json").display())))?;
    let result = read_results_json(&text)?;
    fs::create_dir_all(&c.out).map_err(cfg_err)?;

    fs::copy(input.join("results.csv"), c.out.join("convergence.csv")).map_err(cfg_err)?;
    let mut w = csv::Writer::from_path(c.out.join("slopes.csv")).map_err(cfg_err)?;
    w.write_record(["column", "slope", "half_width", "intercept", "n"]).map_err(cfg_err)?;
    for s in &result.slopes {
        w.write_record([
            s.column.clone(),
            format!("{:e}", s.slope),
            format!("{:e}", s.half_width),
            format!("{:e}", s.intercept),
            s.n.to_string(),
        ])
        .map_err(cfg_err)?;
    }
    w.flush().map_err(cfg_err)?;

    let mut w = csv::Writer::from_path(c.out.join("residual.csv")).map_err(cfg_err)?;
    let res_cols: Vec<&str> = CSV_COLUMNS.iter().copied().filter(|n| n.starts_with("R_")).collect();
    let mut header = vec!["epsilon"];
    header.extend(&res_cols);
    w.write_record(&header).map_err(cfg_err)?;
    for r in &result.rows {
        let n = &r.residual;
        let vals = [n.rho_l2, n.u_l2, n.v_l2, n.rho_linf, n.u_linf, n.v_linf, n.total_l2];
        let mut rec = vec![format!("{:e}", r.epsilon)];
        rec.extend(vals.iter().map(|v| format!("{v:e}")));
        w.write_record(&rec).map_err(cfg_err)?;
    }
    w.flush().map_err(cfg_err)?;

    if let Ok(text) = fs::read_to_string(input.join("lemmas.jsonl")) {
        let mut w = csv::Writer::from_path(c.out.join("lemma_ratios.csv")).map_err(cfg_err)?;
        w.write_record(["lemma", "sample_id", "ratio", "pass"]).map_err(cfg_err)?;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let r: LemmaRecord = serde_json::from_str(line).map_err(cfg_err)?;
            w.write_record([r.lemma, r.sample_id.to_string(), format!("{:e}", r.ratio), r.pass.to_string()])
                .map_err(cfg_err)?;
        }
        w.flush().map_err(cfg_err)?;
    }

    if let Some(eps) = result
        .rows
        .iter()
        .map(|r| r.epsilon)
        .min_by(|a, b| (a - 0.05).abs().total_cmp(&(b - 0.05).abs()))
    {
        profile(input, &c.out, eps)?;
    }
    log::info!("report data written to {}", c.out.display());
    Ok(())
}

/// `u^eps`, `u_e0 + u_p0` and `u_e0` against `y <= 10 eps` at the last stored
/// level, on the `x` slice where the outer wall slip is largest.
fn profile(input: &Path, out: &Path, eps: f64) -> Result<(), Failure> {
    let load = |name: String| {
        let p = input.join(&name);
        Checkpoint::load(&p).map_err(|e| cfg_err(format!("{}: {e}", p.display())))
    };
    let ns = load(format!("ns_eps{eps}.zvck"))?;
    let an = load(format!("ansatz_eps{eps}.zvck"))?;
    let n = ns.levels.len() - 1;
    if an.levels.len() != ns.levels.len() {
        return Err(cfg_err("checkpoint level counts differ"));
    }
    let u = ns.field("u", n)?;
    let lead = an.field("u_lead", n)?;
    let ue = an.field("u_e", n)?;
    let wall = ue.wall();
    let i = (0..wall.len())
        .max_by(|&a, &b| wall[a].abs().total_cmp(&wall[b].abs()))
        .unwrap_or(0);
    let mut w = csv::Writer::from_path(out.join(format!("profile_eps{eps}.csv"))).map_err(cfg_err)?;
    w.write_record(["y", "u_ns", "u_outer_plus_layer", "u_outer"]).map_err(cfg_err)?;
    for (j, &y) in u.grid().y_nodes().iter().enumerate() {
        if y > 10.0 * eps {
            break;
        }
        let rec = [y, u.values()[(i, j)], lead.values()[(i, j)], ue.values()[(i, j)]];
        w.write_record(rec.iter().map(|v| format!("{v:e}"))).map_err(cfg_err)?;
    }
    w.flush().map_err(cfg_err)?;
    Ok(())
}
