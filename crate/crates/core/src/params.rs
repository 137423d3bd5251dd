//! Physical and numerical constants shared by every solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and numerical constants.
///
/// The viscosity seen by the Navier-Stokes solver is `epsilon^2 * nu`
/// (shear) and `epsilon^2 * (nu + sigma)` (bulk). Pressure follows the
/// isentropic law `P = a rho^gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    pub gamma: f64,
    pub a: f64,
    pub nu: f64,
    pub sigma: f64,
    pub epsilon: f64,
    /// Conormal derivative weight.
    pub delta: f64,
    /// Density lower-bound constant; data must satisfy `4 c0 <= rho <= 1/c0`.
    pub c0: f64,
    pub t_final: f64,
    /// Base analyticity radius of the Fourier weight.
    pub mu0: f64,
    /// Radius shrink rate.
    pub lambda: f64,
    /// Energy-weight exponent, in (0, 1).
    pub eta: f64,
    /// Boundary-layer derivative weight.
    pub kappa: f64,
    /// Weight `A` damping the tangential velocity in the energy functional.
    pub energy_a: f64,
    /// Courant number for explicit convective updates.
    pub cfl: f64,
    /// Spacing of stored time levels.
    pub save_dt: f64,
    /// The viscous solver never uses a step larger than `t_final / dt_cap_divisor`.
    pub dt_cap_divisor: usize,
    /// Abort when the sup norm of the velocity gradient exceeds this.
    pub blowup_grad: f64,
    /// Enable minmod slope limiting in the finite-volume reconstruction.
    pub limiter: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        let t_final = 0.25;
        let mu0 = 0.01;
        SimParams {
            gamma: 2.0,
            a: 0.5,
            nu: 1.0,
            sigma: 0.0,
            epsilon: 0.05,
            delta: 0.1,
            c0: 0.2,
            t_final,
            mu0,
            // mu0 - lambda T = mu0 / 2
            lambda: mu0 / (2.0 * t_final),
            eta: 0.1,
            kappa: 0.1,
            energy_a: 10.0,
            cfl: 0.4,
            save_dt: 0.0025,
            dt_cap_divisor: 2000,
            blowup_grad: 1.0e3,
            limiter: false,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: &str) -> Error {
            Error::InvalidParam {
                name,
                reason: reason.to_string(),
            }
        }
        let finite = [
            self.gamma,
            self.a,
            self.nu,
            self.sigma,
            self.epsilon,
            self.delta,
            self.c0,
            self.t_final,
            self.mu0,
            self.lambda,
            self.eta,
            self.kappa,
            self.energy_a,
            self.cfl,
            self.save_dt,
            self.blowup_grad,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(bad("params", "all values must be finite"));
        }
        if self.gamma <= 1.0 {
            return Err(bad("gamma", "must exceed 1"));
        }
        if self.a <= 0.0 {
            return Err(bad("a", "must be positive"));
        }
        if self.nu <= 0.0 {
            return Err(bad("nu", "must be positive"));
        }
        if self.nu + self.sigma < 0.0 {
            return Err(bad("sigma", "nu + sigma must be non-negative"));
        }
        if self.epsilon <= 0.0 {
            return Err(bad("epsilon", "must be positive"));
        }
        if self.c0 <= 0.0 {
            return Err(bad("c0", "must be positive"));
        }
        if !(self.mu0 > 0.0 && self.mu0 <= 0.01) {
            return Err(bad("mu0", "must lie in (0, 1/100]"));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(bad("eta", "must lie in (0, 1)"));
        }
        if self.delta <= 0.0 || self.kappa <= 0.0 || self.lambda < 0.0 {
            return Err(bad("delta/kappa/lambda", "weights must be positive"));
        }
        if self.energy_a <= 1.0 {
            return Err(bad("energy_a", "must exceed 1"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(bad("cfl", "must lie in (0, 1]"));
        }
        if self.t_final < 0.0 || self.save_dt <= 0.0 {
            return Err(bad("t_final/save_dt", "need t_final >= 0 and save_dt > 0"));
        }
        if self.dt_cap_divisor == 0 {
            return Err(bad("dt_cap_divisor", "must be positive"));
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        SimParams {
            epsilon,
            ..self.clone()
        }
    }

    /// `P(rho) = a rho^gamma`.
    #[inline]
    pub fn pressure(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma)
    }

    /// `P'(rho)`, the squared sound speed.
    #[inline]
    pub fn sound_speed_sq(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 1.0)
    }

    /// `P'(rho) / rho`: the factor with `(1/rho) grad P = enthalpy_slope * grad rho`.
    /// Equals 1 for `gamma = 2, a = 1/2`.
    #[inline]
    pub fn enthalpy_slope(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 2.0)
    }

    /// Number of stored levels after the initial one and the exact level spacing for horizon `t`.
    pub fn save_levels(&self, t: f64) -> (usize, f64) {
        if t <= 0.0 {
            return (0, self.save_dt);
        }
        let n = (t / self.save_dt - 1e-9).ceil().max(1.0) as usize;
        (n, t / n as f64)
    }
}

/// Pointwise pressure of a density field.
pub fn pressure(
    rho: &crate::field::Field2D,
    params: &SimParams,
) -> Result<crate::field::Field2D> {
    for ((i, j), &r) in rho.values().indexed_iter() {
        if !(r > 0.0) {
            return Err(Error::NonPositiveDensity { i, j, value: r });
        }
    }
    Ok(rho.map(|r| params.pressure(r)))
}
