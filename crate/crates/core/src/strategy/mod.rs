//! Agent strategies: neighbour selection, Q updates, rewards, loop penalties
//! and the per-message agent behaviour.

use core::fmt;
use core::str::FromStr;

use crate::error::SimError;

mod handler;
mod qtable;
mod reward;
mod select;
mod tpot;

pub(crate) use handler::{dispatch_tpot_rewards, handle_message, start_call};
pub use qtable::{update_q, QTable};
pub use reward::{compute_penalty, qr_feedback, reward_ptc_a, reward_ptc_m};
pub use select::{boltzmann_probabilities, select_neighbor};
pub use tpot::{Feature, LinkUsageMonitor, RewardStash, StashedCall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    PtcA,
    PtcM,
    Qr,
    TpotRl,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] =
        [StrategyKind::PtcA, StrategyKind::PtcM, StrategyKind::Qr, StrategyKind::TpotRl];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::PtcA => "ptc-a",
            StrategyKind::PtcM => "ptc-m",
            StrategyKind::Qr => "qr",
            StrategyKind::TpotRl => "tpot-rl",
        }
    }

    pub fn is_ptc(self) -> bool {
        matches!(self, StrategyKind::PtcA | StrategyKind::PtcM)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SimError::Config(alloc::format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyParams {
    pub alpha: f64,
    pub tau: f64,
    /// Initial value of every Q entry.
    pub q_init: f64,
    pub activity_window: usize,
    pub usage_threshold: f64,
    pub update_interval: u64,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            alpha: 0.03,
            tau: 0.1,
            q_init: 0.5,
            activity_window: 100,
            usage_threshold: 5.0,
            update_interval: 100,
        }
    }
}

impl StrategyParams {
    pub fn validate(&self, capacity: u32) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Config(m.into()));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0, 1]");
        }
        if !(self.tau > 0.0) {
            return bad("tau must be positive");
        }
        if !(-1.0..=1.0).contains(&self.q_init) {
            return bad("q_init must lie in [-1, 1]");
        }
        if self.activity_window == 0 || self.update_interval == 0 {
            return bad("activity_window and update_interval must be positive");
        }
        if !(self.usage_threshold > 0.0 && self.usage_threshold <= capacity as f64) {
            return bad("usage_threshold must lie in (0, capacity]");
        }
        Ok(())
    }
}
