//! Weighted energy and dissipation proxies of an error trajectory.

use serde::{Deserialize, Serialize};

use super::{dx, dy, ConormalSpectra, NormSpec};
use crate::error::{Error, Result};
use crate::field::{Field2D, State};
use crate::params::SimParams;

/// Repeated stencil differentiation beyond this order is dominated by
/// round-off on the sweep grids.
pub const MAX_DIAGNOSTIC_ORDER: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    /// Requested conormal order; capped at [`MAX_DIAGNOSTIC_ORDER`].
    pub k: usize,
    /// Radii sampled per time: `mu_j = (mu0 - lambda t) j / mu_samples`.
    pub mu_samples: usize,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            k: MAX_DIAGNOSTIC_ORDER,
            mu_samples: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDiagnostics {
    pub times: Vec<f64>,
    pub e_series: Vec<f64>,
    pub d_series: Vec<f64>,
    pub k_requested: usize,
    pub k_used: usize,
}

impl EnergyDiagnostics {
    /// `max E` over the times in `[t0, t1]`.
    pub fn max_e_between(&self, t0: f64, t1: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.e_series)
            .filter(|(t, _)| **t >= t0 - 1e-12 && **t <= t1 + 1e-12)
            .map(|(_, e)| *e)
            .fold(0.0, f64::max)
    }
}

/// For each time, `sup_mu h^eta [eps^-2 (A^-1 |u|_k^2 + |v|_k^2 + |rho|_k^2)
/// + h |d_x rho|_{k-1}^2 + |d_y (u, v, rho)|_{k-1}^2]` and
/// `sup_mu h^eta |grad (u, v)|_k^2`, with `h = mu0 - mu - lambda t`.
pub fn energy_diagnostics(
    error_traj: &[State],
    params: &SimParams,
    epsilon: f64,
    cfg: &EnergyConfig,
) -> Result<EnergyDiagnostics> {
    if cfg.k == 0 {
        return Err(Error::InvalidParam {
            name: "k",
            reason: "energy needs k >= 1 for the derivative terms".into(),
        });
    }
    if cfg.mu_samples == 0 {
        return Err(Error::InvalidParam {
            name: "mu_samples",
            reason: "must be positive".into(),
        });
    }
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    check_uniform(error_traj)?;
    let k = cfg.k.min(MAX_DIAGNOSTIC_ORDER);
    let delta = params.delta;
    let a_inv = 1.0 / params.energy_a;
    let e2_inv = 1.0 / (epsilon * epsilon);

    let mut times = Vec::with_capacity(error_traj.len());
    let mut e_series = Vec::with_capacity(error_traj.len());
    let mut d_series = Vec::with_capacity(error_traj.len());
    for s in error_traj {
        let spec = |f: &Field2D, k| ConormalSpectra::new(f, k, delta);
        let (su, sv, sr) = (spec(&s.u, k), spec(&s.v, k), spec(&s.rho, k));
        let (uy, vy) = (dy(&s.u), dy(&s.v));
        let (ux, vx) = (dx(&s.u), dx(&s.v));
        let sy_km1 = [spec(&uy, k - 1), spec(&vy, k - 1), spec(&dy(&s.rho), k - 1)];
        let srx = spec(&dx(&s.rho), k - 1);
        let grad_k = [spec(&ux, k), spec(&uy, k), spec(&vx, k), spec(&vy, k)];

        let base = NormSpec::from_params(params, k, 0.0, s.t);
        let limit = base.radius_limit();
        if !(limit > 0.0) {
            return Err(Error::NormSpec { mu: 0.0, limit });
        }
        let (mut e_max, mut d_max) = (0.0_f64, 0.0_f64);
        for j in 0..cfg.mu_samples {
            let mu = limit * j as f64 / cfg.mu_samples as f64;
            base.with_mu(mu).validate()?;
            let h = limit - mu;
            let w = |xi: f64| (2.0 * mu * xi).exp();
            let n = |c: &ConormalSpectra| c.weighted(w);
            let e = e2_inv * (a_inv * n(&su) + n(&sv) + n(&sr))
                + h * n(&srx)
                + sy_km1.iter().map(n).sum::<f64>();
            let d: f64 = grad_k.iter().map(n).sum();
            let hw = h.powf(params.eta);
            e_max = e_max.max(hw * e);
            d_max = d_max.max(hw * d);
        }
        times.push(s.t);
        e_series.push(e_max);
        d_series.push(d_max);
    }
    Ok(EnergyDiagnostics {
        times,
        e_series,
        d_series,
        k_requested: cfg.k,
        k_used: k,
    })
}

fn check_uniform(traj: &[State]) -> Result<()> {
    if traj.len() < 2 {
        return Ok(());
    }
    let dt = traj[1].t - traj[0].t;
    let ok = dt > 0.0
        && traj
            .windows(2)
            .all(|w| ((w[1].t - w[0].t) - dt).abs() <= 1e-9 * dt.max(1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::TimeGrid("error trajectory must be uniformly spaced in time".into()))
    }
}
