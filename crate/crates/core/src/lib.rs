//! Discrete-time simulation of learning agents that route calls through a
//! circuit-switched mesh network.
//!
//! Every node is an agent holding a Q-table of expected bandwidth
//! availability towards each destination via each neighbour. Four
//! information-sharing strategies are provided:
//!
//! - [`StrategyKind::PtcA`] / [`StrategyKind::PtcM`]: node states are shared
//!   only after a call connects, travelling back along the circuit and
//!   aggregated by average or minimum.
//! - [`StrategyKind::Qr`]: Q-routing, where each forwarded-to neighbour
//!   replies with its own best estimate.
//! - [`StrategyKind::TpotRl`]: link-usage features and periodic dispatch of
//!   accumulated estimates along completed call paths.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the experiment
//! runner and the command line live in the `callroute` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod sim;
pub mod strategy;
pub mod topology;

pub use error::{BandwidthError, SimError, TopologyError};
pub use metrics::{MetricAccumulators, RunReport, WindowStats};
pub use sim::{
    Call, CallId, CallStatus, DurationModel, LoadSchedule, Message, MessageKind, NodeState,
    SimConfig, Tick, World,
};
pub use strategy::{StrategyKind, StrategyParams};
pub use topology::{HopDistanceTable, NodeId, Topology};
