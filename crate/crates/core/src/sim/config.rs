use alloc::format;
use alloc::vec::Vec;

use super::Tick;
use crate::error::SimError;
use crate::strategy::{StrategyKind, StrategyParams};

/// How call holding times are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DurationModel {
    /// Geometric on `{1, 2, ...}` with the configured mean.
    Geometric,
    /// Every call lasts exactly the mean.
    Fixed,
}

/// Piecewise-constant call origination probability.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSchedule {
    levels: Vec<(Tick, f64)>,
}

impl LoadSchedule {
    pub fn constant(p: f64) -> Self {
        LoadSchedule { levels: alloc::vec![(0, p)] }
    }

    /// Start ticks must begin at 0 and strictly increase; probabilities lie
    /// in `(0, 1)`.
    pub fn new(levels: Vec<(Tick, f64)>) -> Result<Self, SimError> {
        if levels.first().map(|l| l.0) != Some(0) {
            return Err(SimError::Config("load schedule must start at tick 0".into()));
        }
        if levels.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SimError::Config("load schedule ticks must strictly increase".into()));
        }
        if let Some(&(_, p)) = levels.iter().find(|l| !(l.1 > 0.0 && l.1 < 1.0)) {
            return Err(SimError::Config(format!("origination probability {p} outside (0, 1)")));
        }
        Ok(LoadSchedule { levels })
    }

    /// Levels changing at equal intervals over `total_ticks`.
    pub fn equal_intervals(probabilities: &[f64], total_ticks: Tick) -> Result<Self, SimError> {
        let k = probabilities.len() as Tick;
        if k == 0 {
            return Err(SimError::Config("empty load schedule".into()));
        }
        let levels = probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as Tick * total_ticks / k, p))
            .collect();
        LoadSchedule::new(levels)
    }

    pub fn levels(&self) -> &[(Tick, f64)] {
        &self.levels
    }

    /// Number of distinct load levels in the run.
    pub fn degree_of_dynamism(&self) -> usize {
        self.levels.len()
    }

    pub fn probability_at(&self, tick: Tick) -> f64 {
        let idx = self.levels.partition_point(|l| l.0 <= tick);
        self.levels[idx.saturating_sub(1)].1
    }

    /// Tick ranges `[start, end)` of each level, the last ending at `total_ticks`.
    pub fn intervals(&self, total_ticks: Tick) -> Vec<(Tick, Tick, f64)> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, &(start, p))| {
                let end = self.levels.get(i + 1).map_or(total_ticks, |l| l.0);
                (start, end, p)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub strategy: StrategyKind,
    pub params: StrategyParams,
    /// Setup-time budget `t_live` in ticks.
    pub setup_time: Tick,
    pub mean_duration: f64,
    pub duration_model: DurationModel,
    /// Call-channel units per node.
    pub capacity: u32,
    pub load_schedule: LoadSchedule,
    pub total_ticks: Tick,
    pub seed: u64,
    /// Window `T` of the time series.
    pub metrics_window: Tick,
}

impl SimConfig {
    /// Defaults for a network with the given setup time: mean duration
    /// twenty times the setup time, capacity 10, α = 0.03, τ = 0.1.
    pub fn with_setup_time(strategy: StrategyKind, setup_time: Tick, load: f64, total_ticks: Tick) -> Self {
        SimConfig {
            strategy,
            params: StrategyParams::default(),
            setup_time,
            mean_duration: 20.0 * setup_time as f64,
            duration_model: DurationModel::Geometric,
            capacity: 10,
            load_schedule: LoadSchedule::constant(load),
            total_ticks,
            seed: 0,
            metrics_window: 1000,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate(self.capacity)?;
        if self.capacity == 0 {
            return Err(SimError::Config("capacity must be positive".into()));
        }
        if self.setup_time == 0 {
            return Err(SimError::Config("setup_time must be positive".into()));
        }
        if !(self.mean_duration >= 1.0) {
            return Err(SimError::Config("mean_duration must be at least 1".into()));
        }
        if self.metrics_window == 0 || self.total_ticks % self.metrics_window != 0 {
            return Err(SimError::Config("total_ticks must be a positive multiple of metrics_window".into()));
        }
        // Re-check a schedule that may have been built field by field.
        LoadSchedule::new(self.load_schedule.levels.clone())?;
        Ok(())
    }
}
