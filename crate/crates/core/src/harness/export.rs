//! `results.csv`, `results.json` and lemma JSONL.
//!
//! CSV columns, in order (see [`CSV_COLUMNS`]):
//!
//! - `epsilon`
//! - `err_{rho,u,v}_{L2,Linf}`: against `(rho_e0, u_e0 + u_p0, v_e0 + eps v_p1)`
//! - `full_err_{rho,u,v}_{L2,Linf}`: against the full composed ansatz
//! - `euler_err_u_Linf`, `euler_err_u_Linf_near_wall`, `euler_wall_trace`: outer flow alone, at the horizon
//! - `R_{rho,u,v}_{L2,Linf}`, `R_L2`: windowed ansatz residual at the horizon
//! - `gevrey_err_u`, `energy_E_max`, `energy_D_max`: empty unless the proxy norm was requested
//!
//! Error columns are suprema over the stored levels. Wall-clock
//! time lives only in the JSON.

use std::io::Write;
use std::path::Path;

use super::{SweepResult, SweepRow};
use crate::error::Result;
use crate::norms::{write_jsonl, LemmaRecord};

pub const CSV_COLUMNS: [&str; 26] = [
    "epsilon",
    "err_rho_L2",
    "err_u_L2",
    "err_v_L2",
    "err_rho_Linf",
    "err_u_Linf",
    "err_v_Linf",
    "full_err_rho_L2",
    "full_err_u_L2",
    "full_err_v_L2",
    "full_err_rho_Linf",
    "full_err_u_Linf",
    "full_err_v_Linf",
    "euler_err_u_Linf",
    "euler_err_u_Linf_near_wall",
    "euler_wall_trace",
    "R_rho_L2",
    "R_u_L2",
    "R_v_L2",
    "R_rho_Linf",
    "R_u_Linf",
    "R_v_Linf",
    "R_L2",
    "gevrey_err_u",
    "energy_E_max",
    "energy_D_max",
];

/// Columns that get a rate fit: everything but `epsilon`.
pub(crate) const FIT_COLUMNS: &[&str] = {
    let (_, rest) = CSV_COLUMNS.split_first().unwrap();
    rest
};

pub(crate) fn row_columns(r: &SweepRow) -> Vec<(&'static str, Option<f64>)> {
    let (l, f, e, res) = (&r.leading, &r.full, &r.euler, &r.residual);
    let vals = [
        Some(r.epsilon),
        Some(l.rho_l2),
        Some(l.u_l2),
        Some(l.v_l2),
        Some(l.rho_linf),
        Some(l.u_linf),
        Some(l.v_linf),
        Some(f.rho_l2),
        Some(f.u_l2),
        Some(f.v_l2),
        Some(f.rho_linf),
        Some(f.u_linf),
        Some(f.v_linf),
        Some(e.u_linf),
        Some(e.near_wall_u_linf),
        Some(e.wall_trace),
        Some(res.rho_l2),
        Some(res.u_l2),
        Some(res.v_l2),
        Some(res.rho_linf),
        Some(res.u_linf),
        Some(res.v_linf),
        Some(res.total_l2),
        r.gevrey_u,
        r.energy.as_ref().map(|x| x.e_max),
        r.energy.as_ref().map(|x| x.d_max),
    ];
    CSV_COLUMNS.iter().copied().zip(vals).collect()
}

pub fn results_csv_header() -> String {
    CSV_COLUMNS.join(",")
}

/// One line per row; absent values are empty fields.
pub fn write_csv(rows: &[SweepRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in rows {
        let rec: Vec<String> = row_columns(r)
            .into_iter()
            .map(|(_, v)| v.map(|x| format!("{x:e}")).unwrap_or_default())
            .collect();
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_results_json(result: &SweepResult, w: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(w, result)?;
    Ok(())
}

pub fn read_results_json(text: &str) -> Result<SweepResult> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_lemma_jsonl(records: &[LemmaRecord], path: &Path) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_jsonl(records, f)
}

impl SweepResult {
    /// Writes `results.csv` and `results.json` into `dir`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_csv(&self.rows, std::fs::File::create(dir.join("results.csv"))?)?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("results.json"))?);
        write_results_json(self, &mut f)?;
        f.flush()?;
        Ok(())
    }
}
