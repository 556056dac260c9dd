//! Call success rates, zero-delay deviation, reward-message rates, windowed
//! series and the summaries built from them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::SimError;
use crate::sim::{LoadSchedule, MessageKind, RunDiagnostics, Tick};
use crate::strategy::StrategyKind;

/// Reward-bearing count of one hop transmission. Only messages that carry
/// reward information for `strategy` count.
pub fn count_reward_message(strategy: StrategyKind, kind: MessageKind) -> u64 {
    use MessageKind::*;
    let counted = match strategy {
        StrategyKind::PtcA | StrategyKind::PtcM => kind == Connect,
        StrategyKind::Qr => kind == Feedback,
        StrategyKind::TpotRl => matches!(kind, Forward | Reward),
    };
    u64::from(counted)
}

/// Counters of one metrics window. Call outcomes are attributed to the
/// window in which the call originated, messages to the window they were
/// sent in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WindowStats {
    pub start: Tick,
    pub no: u64,
    pub nc: u64,
    pub nc_izds: u64,
    pub messages: u64,
}

impl WindowStats {
    /// Success rate; NaN for a window without originations.
    pub fn x(&self) -> f64 {
        ratio(self.nc, self.no)
    }

    pub fn x_izds(&self) -> f64 {
        ratio(self.nc_izds, self.no)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        f64::NAN
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricAccumulators {
    window: Tick,
    pub no: u64,
    pub nc: u64,
    pub nc_izds: u64,
    /// Indexed by minimum hop distance.
    pub no_d: Vec<u64>,
    pub nc_d: Vec<u64>,
    pub messages: u64,
    windows: Vec<WindowStats>,
}

impl MetricAccumulators {
    pub fn new(window: Tick, total_ticks: Tick, diameter: u32) -> Self {
        let n = (total_ticks / window) as usize;
        MetricAccumulators {
            window,
            no: 0,
            nc: 0,
            nc_izds: 0,
            no_d: vec![0; diameter as usize + 1],
            nc_d: vec![0; diameter as usize + 1],
            messages: 0,
            windows: (0..n).map(|k| WindowStats { start: k as Tick * window, ..Default::default() }).collect(),
        }
    }

    fn slot(&mut self, t: Tick) -> &mut WindowStats {
        let k = (t / self.window) as usize;
        &mut self.windows[k]
    }

    pub fn record_origination(&mut self, t: Tick, distance: u32) {
        self.no += 1;
        self.no_d[distance as usize] += 1;
        self.slot(t).no += 1;
    }

    pub fn record_connect(&mut self, t_o: Tick, distance: u32) {
        self.nc += 1;
        self.nc_d[distance as usize] += 1;
        self.slot(t_o).nc += 1;
    }

    pub fn record_izds(&mut self, t_o: Tick) {
        self.nc_izds += 1;
        self.slot(t_o).nc_izds += 1;
    }

    pub fn record_message(&mut self, t: Tick) {
        self.messages += 1;
        self.slot(t).messages += 1;
    }

    pub fn window(&self) -> Tick {
        self.window
    }

    pub fn windows(&self) -> &[WindowStats] {
        &self.windows
    }

    pub fn x(&self) -> f64 {
        ratio(self.nc, self.no)
    }

    pub fn x_izds(&self) -> f64 {
        ratio(self.nc_izds, self.no)
    }

    /// `x_d = NC_d / NO_d` for every distance with at least one origination.
    pub fn per_distance_rates(&self) -> Vec<(u32, f64)> {
        self.no_d
            .iter()
            .zip(&self.nc_d)
            .enumerate()
            .filter(|(_, (&no, _))| no > 0)
            .map(|(d, (&no, &nc))| (d as u32, nc as f64 / no as f64))
            .collect()
    }

    pub fn success_series(&self) -> Vec<f64> {
        self.windows.iter().map(WindowStats::x).collect()
    }

    pub fn izds_series(&self) -> Vec<f64> {
        self.windows.iter().map(WindowStats::x_izds).collect()
    }

    /// Reward messages per tick in each window.
    pub fn message_series(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.messages as f64 / self.window as f64).collect()
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub total_ticks: Tick,
    pub metrics: MetricAccumulators,
    pub diagnostics: RunDiagnostics,
}

impl RunReport {
    pub fn new(
        strategy: StrategyKind,
        seed: u64,
        total_ticks: Tick,
        metrics: MetricAccumulators,
        nc_izds: u64,
        diagnostics: RunDiagnostics,
    ) -> Self {
        debug_assert_eq!(metrics.nc_izds, nc_izds);
        RunReport { strategy, seed, total_ticks, metrics, diagnostics }
    }

    pub fn x(&self) -> f64 {
        self.metrics.x()
    }

    pub fn x_izds(&self) -> f64 {
        self.metrics.x_izds()
    }

    /// Reward messages per tick over the whole run.
    pub fn r(&self) -> f64 {
        self.metrics.messages as f64 / self.total_ticks as f64
    }

    /// `x_izds - x`.
    pub fn izds_deviation(&self) -> f64 {
        self.x_izds() - self.x()
    }
}

/// Mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStdev {
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub stdev: f64,
}

pub fn mean_stdev(values: &[f64]) -> MeanStdev {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stdev = if values.len() < 2 {
        0.0
    } else {
        libm::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
    };
    MeanStdev { mean, stdev }
}

fn burn_in(len: usize, fraction: f64) -> usize {
    libm::floor(fraction * len as f64) as usize
}

/// Mean and sample standard deviation of `series` after skipping the first
/// `floor(burn_in_fraction * len)` windows. Windows without a defined value
/// (NaN) are ignored.
pub fn steady_state_average(series: &[f64], burn_in_fraction: f64) -> Result<MeanStdev, SimError> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(SimError::Analysis(format!("burn-in fraction {burn_in_fraction} outside [0, 1)")));
    }
    let skip = burn_in(series.len(), burn_in_fraction);
    let kept: Vec<f64> = series.iter().skip(skip).copied().filter(|v| v.is_finite()).collect();
    if kept.is_empty() {
        return Err(SimError::Analysis(format!("series of {} windows has nothing past burn-in", series.len())));
    }
    Ok(mean_stdev(&kept))
}

/// Percentage difference statistics of one load interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalDifference {
    pub start: Tick,
    pub end: Tick,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamismSummary {
    pub intervals: Vec<IntervalDifference>,
    pub min: MeanStdev,
    pub mean: MeanStdev,
    pub max: MeanStdev,
}

/// Per load interval, min/mean/max over windows of `100 (a - b) / b`, then
/// the mean and standard deviation of each across intervals. A window
/// belongs to the interval containing its start tick; the first
/// `floor(burn_in_fraction * n)` of an interval's `n` windows are skipped.
pub fn dynamism_summary(
    series_a: &[f64],
    series_b: &[f64],
    window: Tick,
    schedule: &LoadSchedule,
    total_ticks: Tick,
    burn_in_fraction: f64,
) -> Result<DynamismSummary, SimError> {
    if series_a.len() != series_b.len() {
        return Err(SimError::Analysis(format!(
            "series lengths differ: {} and {}",
            series_a.len(),
            series_b.len()
        )));
    }
    let mut intervals = Vec::new();
    for (start, end, _) in schedule.intervals(total_ticks) {
        let members: Vec<usize> =
            (0..series_a.len()).filter(|&k| (start..end).contains(&(k as Tick * window))).collect();
        let skip = burn_in(members.len(), burn_in_fraction);
        let mut diffs = Vec::new();
        for &k in &members[skip..] {
            let (a, b) = (series_a[k], series_b[k]);
            if b == 0.0 {
                return Err(SimError::Analysis(format!("zero baseline in window {k}")));
            }
            if a.is_finite() && b.is_finite() {
                diffs.push(100.0 * (a - b) / b);
            }
        }
        if diffs.is_empty() {
            return Err(SimError::Analysis(format!("load interval [{start}, {end}) has no usable windows")));
        }
        intervals.push(IntervalDifference {
            start,
            end,
            min: diffs.iter().copied().fold(f64::INFINITY, f64::min),
            mean: diffs.iter().sum::<f64>() / diffs.len() as f64,
            max: diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    let column = |f: fn(&IntervalDifference) -> f64| mean_stdev(&intervals.iter().map(f).collect::<Vec<_>>());
    Ok(DynamismSummary { min: column(|i| i.min), mean: column(|i| i.mean), max: column(|i| i.max), intervals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_rule_is_strategy_exclusive() {
        use MessageKind::*;
        let kinds = [Forward, Connect, Drop, Penalty, Reward, Feedback];
        let counted = |s| kinds.iter().filter(|&&k| count_reward_message(s, k) == 1).count();
        assert_eq!(count_reward_message(StrategyKind::Qr, Feedback), 1);
        assert_eq!(count_reward_message(StrategyKind::PtcM, Connect), 1);
        assert_eq!(count_reward_message(StrategyKind::TpotRl, Connect), 0);
        assert_eq!(counted(StrategyKind::Qr), 1);
        assert_eq!(counted(StrategyKind::PtcA), 1);
        assert_eq!(counted(StrategyKind::TpotRl), 2);
    }

    #[test]
    fn steady_state_examples() {
        let c = steady_state_average(&[0.4; 10], 0.2).unwrap();
        assert!((c.mean - 0.4).abs() < 1e-15 && c.stdev < 1e-15);
        let s: Vec<f64> = (1..=10).map(f64::from).collect();
        // Windows 3..=10 remain.
        assert_eq!(steady_state_average(&s, 0.2).unwrap().mean, 6.5);
        assert!(steady_state_average(&[f64::NAN; 5], 0.2).is_err());
        assert!(steady_state_average(&[1.0], 1.0).is_err());
        assert!(steady_state_average(&[], 0.2).is_err());
    }

    #[test]
    fn plateau_after_transient() {
        let s: Vec<f64> = (0..50).map(|k| 0.8 - 0.5 * libm::exp(-(k as f64) / 2.0)).collect();
        let m = steady_state_average(&s, 0.2).unwrap();
        assert!((m.mean - 0.8).abs() < 1e-3);
    }

    #[test]
    fn distance_partition() {
        let mut m = MetricAccumulators::new(10, 100, 3);
        for (t, d, ok) in [(0, 1, true), (5, 1, true), (12, 2, false), (40, 2, true), (99, 3, false)] {
            m.record_origination(t, d);
            if ok {
                m.record_connect(t, d);
            }
        }
        assert_eq!(m.per_distance_rates(), vec![(1, 1.0), (2, 0.5), (3, 0.0)]);
        assert_eq!(m.nc_d.iter().sum::<u64>(), m.nc);
        assert_eq!(m.windows().len(), 10);
        assert_eq!(m.windows()[0].no, 2);
        assert!(m.windows()[2].x().is_nan());
    }

    #[test]
    fn dynamism_examples() {
        let sched = LoadSchedule::equal_intervals(&[0.2, 0.6], 40).unwrap();
        let b = [0.5, 0.5, 0.4, 0.4];
        let same = dynamism_summary(&b, &b, 10, &sched, 40, 0.0).unwrap();
        assert_eq!(same.mean.mean, 0.0);
        let a: Vec<f64> = b.iter().map(|v| v * 1.1).collect();
        let ten = dynamism_summary(&a, &b, 10, &sched, 40, 0.0).unwrap();
        for i in &ten.intervals {
            assert!((i.min - 10.0).abs() < 1e-9 && (i.max - 10.0).abs() < 1e-9);
        }
        // Interval 1: +20%, 0%; interval 2: -25%, +50%.
        let a = [0.6, 0.5, 0.3, 0.6];
        let s = dynamism_summary(&a, &b, 10, &sched, 40, 0.0).unwrap();
        assert!((s.intervals[0].mean - 10.0).abs() < 1e-9);
        assert!((s.intervals[1].min + 25.0).abs() < 1e-9);
        assert!((s.intervals[1].max - 50.0).abs() < 1e-9);
        assert!((s.mean.mean - 11.25).abs() < 1e-9);
        assert!((s.max.mean - 35.0).abs() < 1e-9);
        assert!(dynamism_summary(&a, &[0.5, 0.0, 0.4, 0.4], 10, &sched, 40, 0.0).is_err());
    }
}
