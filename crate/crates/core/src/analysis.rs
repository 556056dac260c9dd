//! Closed forms for how stale non-local state information is when it
//! reaches an agent, and the expected fraction of state changes missed
//! between observations.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::SimError;

/// Periodic setting: a task every `t_c` ticks, `dt` ticks per hop, and an
/// information source `k` hops away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayParams {
    pub t_c: u64,
    pub dt: u64,
    pub k: u64,
}

impl DelayParams {
    pub fn new(t_c: u64, dt: u64, k: u64) -> Result<Self, SimError> {
        if t_c == 0 || dt == 0 || k == 0 {
            return Err(SimError::Analysis("t_c, dt and k must all be positive".into()));
        }
        Ok(DelayParams { t_c, dt, k })
    }
}

/// Staleness under nearest-neighbour exchange: `(k-1)(t_c - dt) + dt`.
/// Signed because the expression leaves the model's domain when
/// `t_c < dt`.
pub fn nn_delay(p: DelayParams) -> i64 {
    (p.k as i64 - 1) * (p.t_c as i64 - p.dt as i64) + p.dt as i64
}

/// Staleness when state travels back along a completed task path: `k dt`.
pub fn ptc_delay(p: DelayParams) -> i64 {
    (p.k * p.dt) as i64
}

/// Nearest-neighbour staleness under irregular task intervals:
/// `sum of the k-1 most recent intervals - (k-2) dt`. `intervals[0]` is
/// the most recent.
pub fn nn_delay_nonperiodic(intervals: &[u64], dt: u64, k: u64) -> Result<i64, SimError> {
    if k == 0 || dt == 0 {
        return Err(SimError::Analysis("dt and k must be positive".into()));
    }
    let need = (k - 1) as usize;
    if intervals.len() < need {
        return Err(SimError::Analysis(format!("{need} intervals needed for k = {k}, got {}", intervals.len())));
    }
    if intervals[..need].contains(&0) {
        return Err(SimError::Analysis("intervals must be positive".into()));
    }
    let sum: u64 = intervals[..need].iter().sum();
    Ok(sum as i64 - (k as i64 - 2) * dt as i64)
}

/// The periodic comparison: PTC is fresher than NN for every `k > 1`
/// exactly when `t_c > 2 dt`.
pub fn ptc_fresher_periodic(p: DelayParams) -> bool {
    ptc_delay(p) < nn_delay(p)
}

/// Exact condition for PTC to be fresher under irregular intervals:
/// `sum of the k-1 most recent intervals > 2(k-1) dt`.
pub fn ptc_fresher_nonperiodic_condition(intervals: &[u64], dt: u64, k: u64) -> bool {
    let need = (k.saturating_sub(1)) as usize;
    let sum: u64 = intervals.iter().take(need).sum();
    sum > 2 * (k.saturating_sub(1)) * dt
}

/// A node cycling through `M` states, state `m` lasting `durations[m]`
/// ticks, observed every `t_d` ticks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDwellSpec {
    pub durations: Vec<u64>,
    pub t_d: u64,
}

/// Largest number of states handled.
pub const MAX_STATES: usize = 64;

impl StateDwellSpec {
    pub fn new(durations: Vec<u64>, t_d: u64) -> Result<Self, SimError> {
        if durations.is_empty() || durations.len() > MAX_STATES {
            return Err(SimError::Analysis(format!("need 1..={MAX_STATES} states, got {}", durations.len())));
        }
        if durations.contains(&0) {
            return Err(SimError::Analysis("state durations must be positive".into()));
        }
        if t_d >= durations.iter().sum::<u64>() {
            return Err(SimError::Analysis("observation gap must be shorter than the full cycle".into()));
        }
        Ok(StateDwellSpec { durations, t_d })
    }
}

/// Reduced non-negative fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den);
        Ratio { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Fraction of the `C(M, h+1)` size-`(h+1)` subsets of states whose total
/// duration fits within the observation gap, i.e. the chance that `h+1`
/// states are passed between two observations.
pub fn expected_state_changes(spec: &StateDwellSpec, h: usize) -> Result<Ratio, SimError> {
    let m = spec.durations.len();
    if h >= m {
        return Err(SimError::Analysis(format!("h = {h} must be below M = {m}")));
    }
    let size = h + 1;
    let cap = spec.t_d as usize;
    // ways[s][t]: subsets of the states seen so far with s members summing to t.
    let mut ways = vec![vec![0u128; cap + 1]; size + 1];
    ways[0][0] = 1;
    for &l in &spec.durations {
        let l = l as usize;
        if l > cap {
            continue;
        }
        for s in (1..=size).rev() {
            for t in (l..=cap).rev() {
                ways[s][t] += ways[s - 1][t - l];
            }
        }
    }
    let fitting: u128 = ways[size].iter().sum();
    Ok(Ratio::new(fitting, binomial(m as u64, size as u64)))
}
