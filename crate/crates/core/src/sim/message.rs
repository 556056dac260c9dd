use alloc::vec::Vec;

use super::{CallId, HoldId, Tick};
use crate::strategy::Feature;
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    /// `m_r`: forward the call request.
    Forward,
    /// `m_c`: the call reached its destination, allocate on the way back.
    Connect,
    /// `m_d`: release reservations on the way back.
    Drop,
    /// `m_p`: penalise and release the nodes of an excised loop.
    Penalty,
    /// `m_cr`: periodic reward carrying accumulated estimates (TPOT-RL).
    Reward,
    /// Q-routing reply with the forwarded-to neighbour's best estimate.
    Feedback,
}

/// A control-channel message. Every message is delivered exactly one tick
/// after it was sent.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub kind: MessageKind,
    pub call: CallId,
    pub from: NodeId,
    pub to: NodeId,
    pub destination: NodeId,
    pub sent: Tick,
    pub arrival: Tick,
    /// Creation order, used to process a tick's deliveries deterministically.
    pub seq: u64,
    /// Route carried by the message. For `Penalty` this is the loop segment
    /// starting at the node that detected the loop.
    pub path: Vec<NodeId>,
    /// Reservation of each `path` entry, where the kind touches bandwidth.
    pub holds: Vec<HoldId>,
    /// Node states (PTC), appended estimates (TPOT-RL) or the single
    /// feedback value (Q-routing).
    pub payload: Vec<f64>,
    /// Usage feature each forwarding node acted under (TPOT-RL).
    pub features: Vec<Feature>,
    /// Penalty to apply at the recipient, in `[-1, 0)`.
    pub penalty: f64,
    /// Node where the loop was detected.
    pub loop_source: Option<NodeId>,
}

impl Message {
    pub(crate) fn new(kind: MessageKind, call: CallId, from: NodeId, to: NodeId, destination: NodeId) -> Self {
        Message {
            kind,
            call,
            from,
            to,
            destination,
            sent: 0,
            arrival: 0,
            seq: 0,
            path: Vec::new(),
            holds: Vec::new(),
            payload: Vec::new(),
            features: Vec::new(),
            penalty: 0.0,
            loop_source: None,
        }
    }

    /// Index of `node` on the carried path.
    pub fn position_of(&self, node: NodeId) -> Option<usize> {
        self.path.iter().position(|&n| n == node)
    }
}
