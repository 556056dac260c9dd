//! Discrete-time engine: clock, call lifecycle, bandwidth accounting and
//! one-tick-per-hop message transport.

mod call;
mod config;
mod message;
mod state;
mod world;

pub use call::{Call, CallId, CallStatus, Hold, HoldId, HoldKind};
pub use config::{DurationModel, LoadSchedule, SimConfig};
pub use message::{Message, MessageKind};
pub use state::NodeState;
pub use world::{RunDiagnostics, World};

/// Simulation time step.
pub type Tick = u64;
