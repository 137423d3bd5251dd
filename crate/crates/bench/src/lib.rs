//! Shared fixtures for the benchmarks under `benches/`.

use std::sync::Arc;

use zerovisc::harness::SweepConfig;
use zerovisc::{make_initial_data, Grid2D, SimParams, State};

/// Shear-bump data on the default sweep grid at `eps`.
pub fn sweep_state(eps: f64) -> (State, SimParams) {
    let cfg = SweepConfig::default();
    let p = cfg.params_for(eps);
    let grid = cfg.grid_for(eps).expect("default sweep grid");
    let s = make_initial_data(&cfg.scenario, &grid, &p).expect("catalog data");
    (s, p)
}

/// Grid of the default sweep at `eps`.
pub fn sweep_grid(eps: f64) -> Arc<Grid2D> {
    SweepConfig::default().grid_for(eps).expect("default sweep grid")
}
