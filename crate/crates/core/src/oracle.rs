//! Instantaneous zero-delay search: an upper bound on achievable
//! connections, given perfect and immediate knowledge of every node's free
//! bandwidth.

use alloc::collections::VecDeque;
use alloc::vec;

use crate::sim::Call;
use crate::topology::{NodeId, Topology};

/// Whether some path from `s` to `d`, endpoints included, consists only of
/// nodes with at least one free unit.
pub fn izds_path_exists(topo: &Topology, free_units: &[u32], s: NodeId, d: NodeId) -> bool {
    path_exists_through(topo, s, d, |n| free_units[n.index()] >= 1)
}

/// Breadth-first search restricted to nodes for which `available` holds.
pub fn path_exists_through(topo: &Topology, s: NodeId, d: NodeId, available: impl Fn(NodeId) -> bool) -> bool {
    if !available(s) || !available(d) {
        return false;
    }
    let mut seen = vec![false; topo.node_count()];
    let mut queue = VecDeque::from([s]);
    seen[s.index()] = true;
    while let Some(n) = queue.pop_front() {
        if n == d {
            return true;
        }
        for &m in topo.neighbours(n) {
            if !seen[m.index()] && available(m) {
                seen[m.index()] = true;
                queue.push_back(m);
            }
        }
    }
    false
}

/// Counts calls for which a zero-delay search succeeded at least once while
/// the call was open.
#[derive(Debug, Clone, Default)]
pub struct IzdsTracker {
    nc_izds: u64,
    checks: u64,
}

impl IzdsTracker {
    /// Searches for `call` unless it already succeeded. Units the call holds
    /// itself count as available to it. Returns true on the first success.
    pub fn observe(&mut self, topo: &Topology, free_units: &[u32], call: &mut Call) -> bool {
        if call.izds_found {
            return false;
        }
        self.checks += 1;
        let found = path_exists_through(topo, call.source, call.destination, |n| {
            free_units[n.index()] >= 1 || call.holds_at(n)
        });
        if found {
            call.izds_found = true;
            self.nc_izds += 1;
        }
        found
    }

    pub fn nc_izds(&self) -> u64 {
        self.nc_izds
    }

    pub fn checks(&self) -> u64 {
        self.checks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocked_cut_vertex() {
        // 0 - 1 - 2, with a detour 0 - 3 - 2.
        let topo = Topology::new(4, &[(0, 1), (1, 2), (0, 3), (3, 2)], None, None).unwrap();
        assert!(izds_path_exists(&topo, &[1, 0, 1, 1], NodeId(0), NodeId(2)));
        assert!(!izds_path_exists(&topo, &[1, 0, 1, 0], NodeId(0), NodeId(2)));
        assert!(!izds_path_exists(&topo, &[0, 5, 5, 5], NodeId(0), NodeId(2)));
        assert!(!izds_path_exists(&topo, &[5, 5, 0, 5], NodeId(0), NodeId(2)));
    }
}
