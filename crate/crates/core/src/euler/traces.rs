//! Wall traces `f(t, x, 0)` of outer fields and their normal derivatives.

use ndarray::Array2;

use super::EulerTrajectory;
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::stencil::{dx4_1d, fornberg};
use crate::timegrid;

/// Traces of the first-order corrector, each of shape `(nt, nx)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectorTraces {
    pub u1_bar: Array2<f64>,
    pub rho1_bar: Array2<f64>,
    pub v1_bar: Array2<f64>,
    /// `d_y v^1` at the wall.
    pub dvdy1_bar: Array2<f64>,
    pub dxu1_bar: Array2<f64>,
    pub dxv1_bar: Array2<f64>,
}

/// Wall traces sampled on the stored levels of the source trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct WallTraces {
    pub times: Vec<f64>,
    pub lx: f64,
    pub u_bar: Array2<f64>,
    pub rho_bar: Array2<f64>,
    pub dvdy_bar: Array2<f64>,
    pub dudy_bar: Array2<f64>,
    pub d2vdy2_bar: Array2<f64>,
    pub corrector: Option<CorrectorTraces>,
}

/// All traces at one time, with the `x` derivatives the boundary-layer
/// equations need.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSlice {
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub dvdy: Vec<f64>,
    pub dudy: Vec<f64>,
    pub d2vdy2: Vec<f64>,
    pub dxu: Vec<f64>,
    pub dxrho: Vec<f64>,
    pub dxdudy: Vec<f64>,
    pub dxdvdy: Vec<f64>,
    pub corrector: Option<CorrectorSlice>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectorSlice {
    pub u1: Vec<f64>,
    pub rho1: Vec<f64>,
    pub v1: Vec<f64>,
    pub dvdy1: Vec<f64>,
    pub dxu1: Vec<f64>,
    pub dxv1: Vec<f64>,
    pub dxrho1: Vec<f64>,
}

impl WallTraces {
    pub fn nx(&self) -> usize {
        self.u_bar.ncols()
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx() as f64
    }

    /// Traces of a uniform rest background on `times`.
    pub fn rest(times: Vec<f64>, nx: usize, lx: f64) -> Self {
        let nt = times.len();
        WallTraces {
            times,
            lx,
            u_bar: Array2::zeros((nt, nx)),
            rho_bar: Array2::ones((nt, nx)),
            dvdy_bar: Array2::zeros((nt, nx)),
            dudy_bar: Array2::zeros((nt, nx)),
            d2vdy2_bar: Array2::zeros((nt, nx)),
            corrector: None,
        }
    }

    /// Trace slice at time `t`, linear in time between stored levels.
    pub fn at(&self, t: f64) -> Result<TraceSlice> {
        let ts = &self.times;
        let dx = self.dx();
        let row = |a: &Array2<f64>| timegrid::interp_row(a, ts, t);
        let u = row(&self.u_bar)?;
        let rho = row(&self.rho_bar)?;
        let dvdy = row(&self.dvdy_bar)?;
        let dudy = row(&self.dudy_bar)?;
        let corrector = match &self.corrector {
            None => None,
            Some(c) => {
                let rho1 = row(&c.rho1_bar)?;
                Some(CorrectorSlice {
                    u1: row(&c.u1_bar)?,
                    v1: row(&c.v1_bar)?,
                    dvdy1: row(&c.dvdy1_bar)?,
                    dxu1: row(&c.dxu1_bar)?,
                    dxv1: row(&c.dxv1_bar)?,
                    dxrho1: dx4_1d(&rho1, dx),
                    rho1,
                })
            }
        };
        Ok(TraceSlice {
            dxu: dx4_1d(&u, dx),
            dxrho: dx4_1d(&rho, dx),
            dxdudy: dx4_1d(&dudy, dx),
            dxdvdy: dx4_1d(&dvdy, dx),
            d2vdy2: row(&self.d2vdy2_bar)?,
            u,
            rho,
            dvdy,
            dudy,
            corrector,
        })
    }

    /// Multiply every corrector trace by `c` (linearity checks).
    pub fn scale_corrector(&mut self, c: f64) {
        if let Some(cr) = self.corrector.as_mut() {
            for a in [
                &mut cr.u1_bar,
                &mut cr.rho1_bar,
                &mut cr.v1_bar,
                &mut cr.dvdy1_bar,
                &mut cr.dxu1_bar,
                &mut cr.dxv1_bar,
            ] {
                a.mapv_inplace(|v| c * v);
            }
        }
    }
}

/// One-sided third-order wall derivatives of order 1 and 2.
struct WallStencil {
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl WallStencil {
    fn new(y: &[f64]) -> Self {
        let d1 = fornberg(0.0, &y[..4], 1)[1].clone();
        let d2 = fornberg(0.0, &y[..5], 2)[2].clone();
        WallStencil { d1, d2 }
    }

    fn apply(w: &[f64], f: &Field2D, i: usize) -> f64 {
        w.iter().enumerate().map(|(k, c)| c * f.values()[(i, k)]).sum()
    }
}

/// Extract wall traces from the background and (optionally) corrector runs.
pub fn extract_traces(traj0: &EulerTrajectory, traj1: Option<&EulerTrajectory>) -> Result<WallTraces> {
    let grid = traj0.grid();
    if grid.ny() < 5 {
        return Err(Error::Config("trace extraction needs ny >= 5".into()));
    }
    let times = traj0.times();
    let nt = times.len();
    let nx = grid.nx();
    let ws = WallStencil::new(grid.y_nodes());
    let mut out = WallTraces {
        times: times.clone(),
        lx: grid.lx(),
        u_bar: Array2::zeros((nt, nx)),
        rho_bar: Array2::zeros((nt, nx)),
        dvdy_bar: Array2::zeros((nt, nx)),
        dudy_bar: Array2::zeros((nt, nx)),
        d2vdy2_bar: Array2::zeros((nt, nx)),
        corrector: None,
    };
    for (k, s) in traj0.states.iter().enumerate() {
        for i in 0..nx {
            out.u_bar[(k, i)] = s.u.values()[(i, 0)];
            out.rho_bar[(k, i)] = s.rho.values()[(i, 0)];
            out.dvdy_bar[(k, i)] = WallStencil::apply(&ws.d1, &s.v, i);
            out.dudy_bar[(k, i)] = WallStencil::apply(&ws.d1, &s.u, i);
            out.d2vdy2_bar[(k, i)] = WallStencil::apply(&ws.d2, &s.v, i);
        }
    }
    if let Some(t1) = traj1 {
        timegrid::check_same(&times, &t1.times())?;
        let dx = grid.dx();
        let mut c = CorrectorTraces {
            u1_bar: Array2::zeros((nt, nx)),
            rho1_bar: Array2::zeros((nt, nx)),
            v1_bar: Array2::zeros((nt, nx)),
            dvdy1_bar: Array2::zeros((nt, nx)),
            dxu1_bar: Array2::zeros((nt, nx)),
            dxv1_bar: Array2::zeros((nt, nx)),
        };
        for (k, s) in t1.states.iter().enumerate() {
            let u1 = s.u.wall();
            let v1 = s.v.wall();
            let dxu = dx4_1d(&u1, dx);
            let dxv = dx4_1d(&v1, dx);
            for i in 0..nx {
                c.u1_bar[(k, i)] = u1[i];
                c.v1_bar[(k, i)] = v1[i];
                c.rho1_bar[(k, i)] = s.rho.values()[(i, 0)];
                c.dvdy1_bar[(k, i)] = WallStencil::apply(&ws.d1, &s.v, i);
                c.dxu1_bar[(k, i)] = dxu[i];
                c.dxv1_bar[(k, i)] = dxv[i];
            }
        }
        out.corrector = Some(c);
    }
    Ok(out)
}
