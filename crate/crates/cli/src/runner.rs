//! Runs every (cell, seed) of an experiment, in parallel across runs only.

use callroute_core::{RunReport, Topology, World};
use rayon::prelude::*;

use crate::config::{Cell, ExperimentSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub cell: usize,
    pub seed: u64,
    /// The run's report, or why the run failed.
    pub outcome: Result<RunReport, String>,
}

/// One record per `(cell, seed)`, cell-major and then by seed whatever
/// the scheduling. A failing run is recorded and the rest proceed.
pub fn run_experiment(spec: &ExperimentSpec, topo: &Topology, parallel: usize) -> Vec<RunRecord> {
    let units: Vec<(usize, u64)> =
        (0..spec.cells.len()).flat_map(|c| spec.run_seeds().map(move |s| (c, s))).collect();
    let work = || units.par_iter().map(|&(cell, seed)| run_one(spec, topo, cell, seed)).collect::<Vec<_>>();
    match rayon::ThreadPoolBuilder::new().num_threads(parallel).build() {
        Ok(pool) => pool.install(work),
        // Fall back to the global pool.
        Err(_) => work(),
    }
}

fn run_one(spec: &ExperimentSpec, topo: &Topology, cell: usize, seed: u64) -> RunRecord {
    let outcome = run_cell(spec, topo, &spec.cells[cell], seed);
    RunRecord { cell, seed, outcome }
}

pub fn run_cell(spec: &ExperimentSpec, topo: &Topology, cell: &Cell, seed: u64) -> Result<RunReport, String> {
    let config = spec.config_for(cell, seed).map_err(|e| e.to_string())?;
    let world = World::new(topo, config).map_err(|e| e.to_string())?;
    world.run().map_err(|e| e.to_string())
}
