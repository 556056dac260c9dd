//! Network graphs: validation, random geometric generation and all-pairs
//! minimum hop distances.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::TopologyError;

/// Dense node index in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Regeneration budget for [`Topology::random_geometric`].
pub const GEOMETRIC_ATTEMPTS: u32 = 100;

/// Undirected, connected, simple graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    node_count: usize,
    /// Normalised `(low, high)` pairs, sorted.
    edges: Vec<(NodeId, NodeId)>,
    /// Sorted neighbour lists.
    adjacency: Vec<Vec<NodeId>>,
    positions: Option<Vec<(f64, f64)>>,
    radius: Option<f64>,
}

impl Topology {
    /// Validates and builds a topology. When both `positions` and `radius`
    /// are given every edge must be no longer than `radius`.
    pub fn new(
        node_count: usize,
        edges: &[(u32, u32)],
        positions: Option<Vec<(f64, f64)>>,
        radius: Option<f64>,
    ) -> Result<Self, TopologyError> {
        if node_count == 0 {
            return Err(TopologyError::Empty);
        }
        if let Some(p) = &positions {
            if p.len() != node_count {
                return Err(TopologyError::InvalidParameter("position count differs from node count"));
            }
        }
        let mut normalised = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for n in [a, b] {
                if n as usize >= node_count {
                    return Err(TopologyError::NodeOutOfRange { node: n, node_count });
                }
            }
            if a == b {
                return Err(TopologyError::SelfLoop(NodeId(a)));
            }
            normalised.push((NodeId(a.min(b)), NodeId(a.max(b))));
        }
        normalised.sort_unstable();
        for w in normalised.windows(2) {
            if w[0] == w[1] {
                return Err(TopologyError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        if let (Some(p), Some(r)) = (&positions, radius) {
            for &(a, b) in &normalised {
                let d = distance(p[a.index()], p[b.index()]);
                if d > r {
                    return Err(TopologyError::EdgeTooLong { a, b, distance: d, radius: r });
                }
            }
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(a, b) in &normalised {
            adjacency[a.index()].push(b);
            adjacency[b.index()].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let topo = Topology { node_count, edges: normalised, adjacency, positions, radius };
        let reached = topo.reachable_from(NodeId(0));
        if reached != node_count {
            return Err(TopologyError::Disconnected { reached, node_count });
        }
        Ok(topo)
    }

    /// Uniform points in the unit square, linked when within `radius`.
    /// Disconnected draws are regenerated from a derived seed, up to
    /// [`GEOMETRIC_ATTEMPTS`] times.
    pub fn random_geometric(n: usize, radius: f64, seed: u64) -> Result<Self, TopologyError> {
        if n < 2 {
            return Err(TopologyError::InvalidParameter("need at least 2 nodes"));
        }
        if !(radius > 0.0 && radius <= core::f64::consts::SQRT_2) {
            return Err(TopologyError::InvalidParameter("radius must lie in (0, sqrt 2]"));
        }
        for attempt in 0..GEOMETRIC_ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt));
            let positions: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if distance(positions[i], positions[j]) <= radius {
                        edges.push((i as u32, j as u32));
                    }
                }
            }
            match Topology::new(n, &edges, Some(positions), Some(radius)) {
                Ok(t) => return Ok(t),
                Err(TopologyError::Disconnected { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(TopologyError::GenerationFailed { attempts: GEOMETRIC_ATTEMPTS })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count as u32).map(NodeId)
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbours(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node.index()]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node.index()].len()
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.node_count as f64
    }

    pub fn is_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    /// Position of `neighbour` within `node`'s sorted neighbour list.
    pub fn neighbour_index(&self, node: NodeId, neighbour: NodeId) -> Option<usize> {
        self.adjacency[node.index()].binary_search(&neighbour).ok()
    }

    pub fn positions(&self) -> Option<&[(f64, f64)]> {
        self.positions.as_deref()
    }

    /// Link radius the graph was generated with, if any.
    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    fn reachable_from(&self, start: NodeId) -> usize {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::new();
        seen[start.index()] = true;
        queue.push_back(start);
        let mut count = 1;
        while let Some(n) = queue.pop_front() {
            for &m in self.neighbours(n) {
                if !seen[m.index()] {
                    seen[m.index()] = true;
                    count += 1;
                    queue.push_back(m);
                }
            }
        }
        count
    }

    /// Breadth-first hop counts from every node.
    pub fn min_hop_distances(&self) -> HopDistanceTable {
        let n = self.node_count;
        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let du = row[u];
                for &v in &self.adjacency[u] {
                    if row[v.index()] == u32::MAX {
                        row[v.index()] = du + 1;
                        queue.push_back(v.index());
                    }
                }
            }
        }
        HopDistanceTable { n, dist }
    }
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    libm::hypot(a.0 - b.0, a.1 - b.1)
}

fn derive_seed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        return seed;
    }
    // splitmix64 finaliser
    let mut z = seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// All-pairs minimum hop counts, row-major `N x N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopDistanceTable {
    n: usize,
    dist: Vec<u32>,
}

impl HopDistanceTable {
    #[inline]
    pub fn get(&self, a: NodeId, b: NodeId) -> u32 {
        self.dist[a.index() * self.n + b.index()]
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Topology {
        Topology::new(3, &[(0, 1), (1, 2)], None, None).unwrap()
    }

    #[test]
    fn smallest_chain() {
        let t = path3();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.neighbours(NodeId(1)), &[NodeId(0), NodeId(2)]);
        assert_eq!(t.min_hop_distances().get(NodeId(0), NodeId(2)), 2);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert_eq!(
            Topology::new(2, &[(0, 0), (0, 1)], None, None),
            Err(TopologyError::SelfLoop(NodeId(0)))
        );
        assert_eq!(
            Topology::new(2, &[(0, 1), (1, 0)], None, None),
            Err(TopologyError::DuplicateEdge(NodeId(0), NodeId(1)))
        );
        assert_eq!(
            Topology::new(4, &[(0, 1), (2, 3)], None, None),
            Err(TopologyError::Disconnected { reached: 2, node_count: 4 })
        );
        assert!(matches!(
            Topology::new(2, &[(0, 5)], None, None),
            Err(TopologyError::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn complete_graph_distances() {
        let mut edges = Vec::new();
        for i in 0..4u32 {
            for j in i + 1..4 {
                edges.push((i, j));
            }
        }
        let t = Topology::new(4, &edges, None, None).unwrap();
        let d = t.min_hop_distances();
        for a in t.nodes() {
            for b in t.nodes() {
                assert_eq!(d.get(a, b), u32::from(a != b));
            }
        }
    }

    #[test]
    fn two_nodes_full_radius() {
        for seed in 0..20 {
            let t = Topology::random_geometric(2, core::f64::consts::SQRT_2, seed).unwrap();
            assert_eq!(t.edges(), &[(NodeId(0), NodeId(1))]);
        }
    }

    #[test]
    fn geometric_is_deterministic_and_short_edged() {
        let a = Topology::random_geometric(50, 0.22, 7).unwrap();
        let b = Topology::random_geometric(50, 0.22, 7).unwrap();
        assert_eq!(a, b);
        let p = a.positions().unwrap();
        for &(x, y) in a.edges() {
            assert!(distance(p[x.index()], p[y.index()]) <= 0.22);
        }
    }

    #[test]
    fn geometric_parameter_checks() {
        assert!(Topology::random_geometric(1, 0.5, 0).is_err());
        assert!(Topology::random_geometric(5, 0.0, 0).is_err());
        assert!(Topology::random_geometric(5, 1.5, 0).is_err());
        assert_eq!(
            Topology::random_geometric(40, 0.01, 0),
            Err(TopologyError::GenerationFailed { attempts: GEOMETRIC_ATTEMPTS })
        );
    }
}
