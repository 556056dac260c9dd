use alloc::string::String;
use core::fmt;

use crate::sim::CallId;
use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub enum TopologyError {
    Empty,
    NodeOutOfRange { node: u32, node_count: usize },
    SelfLoop(NodeId),
    DuplicateEdge(NodeId, NodeId),
    Disconnected { reached: usize, node_count: usize },
    EdgeTooLong { a: NodeId, b: NodeId, distance: f64, radius: f64 },
    InvalidParameter(&'static str),
    /// No connected graph after the whole regeneration budget.
    GenerationFailed { attempts: u32 },
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::Empty => write!(f, "topology has no nodes"),
            TopologyError::NodeOutOfRange { node, node_count } => {
                write!(f, "node {node} out of range for {node_count} nodes")
            }
            TopologyError::SelfLoop(n) => write!(f, "self-loop on node {n}"),
            TopologyError::DuplicateEdge(a, b) => write!(f, "duplicate edge {a}-{b}"),
            TopologyError::Disconnected { reached, node_count } => write!(
                f,
                "graph is disconnected: node 0 reaches {reached} of {node_count} nodes"
            ),
            TopologyError::EdgeTooLong { a, b, distance, radius } => write!(
                f,
                "edge {a}-{b} has length {distance} beyond radius {radius}"
            ),
            TopologyError::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            TopologyError::GenerationFailed { attempts } => write!(
                f,
                "no connected geometric graph after {attempts} attempts"
            ),
        }
    }
}

/// Contract violations on a node's call-channel counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthError {
    NoFreeUnit,
    NothingPreAllocated,
    NothingAllocated,
}

impl fmt::Display for BandwidthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthError::NoFreeUnit => write!(f, "no free call-channel unit"),
            BandwidthError::NothingPreAllocated => write!(f, "no pre-allocated unit to convert or release"),
            BandwidthError::NothingAllocated => write!(f, "no allocated unit to release"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Topology(TopologyError),
    Bandwidth { node: NodeId, call: CallId, error: BandwidthError },
    /// A hold was released twice or never existed.
    UnknownHold { node: NodeId, call: CallId },
    Config(String),
    Invariant(String),
    /// Analysis inputs outside their preconditions.
    Analysis(String),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Topology(e) => write!(f, "topology: {e}"),
            SimError::Bandwidth { node, call, error } => {
                write!(f, "bandwidth on node {node} for call {call}: {error}")
            }
            SimError::UnknownHold { node, call } => {
                write!(f, "node {node} holds no matching unit for call {call}")
            }
            SimError::Config(m) => write!(f, "config: {m}"),
            SimError::Invariant(m) => write!(f, "invariant violated: {m}"),
            SimError::Analysis(m) => write!(f, "analysis: {m}"),
        }
    }
}

impl From<TopologyError> for SimError {
    fn from(e: TopologyError) -> Self {
        SimError::Topology(e)
    }
}

impl core::error::Error for TopologyError {}
impl core::error::Error for BandwidthError {}
impl core::error::Error for SimError {}
