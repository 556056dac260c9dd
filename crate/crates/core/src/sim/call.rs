use alloc::vec::Vec;
use core::fmt;

use super::Tick;
use crate::error::SimError;
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CallId(pub u64);

impl fmt::Display for CallId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallStatus {
    Forwarding,
    /// The destination allocated its unit. The connect message may still be
    /// travelling back towards the source.
    Connected,
    Dropped,
    Terminated,
}

/// Identifies one reserved unit so that a release always targets the
/// reservation it was issued for, even when a node is revisited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HoldId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoldKind {
    Pre,
    Alloc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hold {
    pub id: HoldId,
    pub node: NodeId,
    pub kind: HoldKind,
    /// Neighbour the call was forwarded to from `node`; `None` at the destination.
    pub via: Option<NodeId>,
    /// Cut out of the route with a loop; released by the penalty cascade.
    pub excised: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Call {
    pub id: CallId,
    pub source: NodeId,
    pub destination: NodeId,
    /// Origination tick.
    pub t_o: Tick,
    /// Setup-time budget.
    pub t_live: Tick,
    /// Ticks the circuit is held once complete.
    pub duration: Tick,
    /// Minimum hop distance between source and destination.
    pub distance: u32,
    pub status: CallStatus,
    /// Current route, source first. The node holding the forward request is
    /// last; loops are cut out as soon as they are detected.
    pub path: Vec<NodeId>,
    pub holds: Vec<Hold>,
    /// Tick the destination allocated.
    pub connected_at: Option<Tick>,
    /// Tick the connect message reached the source.
    pub circuit_at: Option<Tick>,
    /// Tick the call connected or was dropped.
    pub resolved_at: Option<Tick>,
    pub izds_found: bool,
}

impl Call {
    pub fn is_open(&self) -> bool {
        self.status == CallStatus::Forwarding
    }

    pub fn set_status(&mut self, next: CallStatus) -> Result<(), SimError> {
        use CallStatus::*;
        let ok = matches!(
            (self.status, next),
            (Forwarding, Connected) | (Forwarding, Dropped) | (Connected, Terminated)
        );
        if !ok {
            return Err(SimError::Invariant(alloc::format!(
                "call {} cannot move from {:?} to {:?}",
                self.id,
                self.status,
                next
            )));
        }
        self.status = next;
        Ok(())
    }

    pub fn hold(&self, id: HoldId) -> Option<&Hold> {
        self.holds.iter().find(|h| h.id == id)
    }

    pub(crate) fn hold_mut(&mut self, id: HoldId) -> Option<&mut Hold> {
        self.holds.iter_mut().find(|h| h.id == id)
    }

    pub(crate) fn take_hold(&mut self, id: HoldId) -> Option<Hold> {
        let pos = self.holds.iter().position(|h| h.id == id)?;
        Some(self.holds.swap_remove(pos))
    }

    /// Whether `node` currently holds any unit for this call.
    pub fn holds_at(&self, node: NodeId) -> bool {
        self.holds.iter().any(|h| h.node == node)
    }
}
