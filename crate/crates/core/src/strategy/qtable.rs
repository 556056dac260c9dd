use alloc::vec;
use alloc::vec::Vec;

use super::Feature;
use crate::topology::{NodeId, Topology};

/// One learning step towards `reward`, clamped to `[-1, 1]`.
#[inline]
pub fn update_q(q: f64, reward: f64, alpha: f64) -> f64 {
    ((1.0 - alpha) * q + alpha * reward).clamp(-1.0, 1.0)
}

/// Per-agent estimates indexed by destination and neighbour, and for
/// TPOT-RL additionally by the usage feature of the link to that neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    neighbours: Vec<NodeId>,
    node_count: usize,
    features: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(topo: &Topology, owner: NodeId, with_features: bool, init: f64) -> Self {
        let neighbours = topo.neighbours(owner).to_vec();
        let features = if with_features { 2 } else { 1 };
        let len = features * topo.node_count() * neighbours.len();
        QTable { neighbours, node_count: topo.node_count(), features, values: vec![init; len] }
    }

    pub fn neighbours(&self) -> &[NodeId] {
        &self.neighbours
    }

    fn slot(&self, feature: Feature, destination: NodeId, neighbour: NodeId) -> usize {
        let k = self
            .neighbours
            .binary_search(&neighbour)
            .expect("Q lookup for a node that is not a neighbour");
        let f = if self.features == 2 { feature as usize } else { 0 };
        (f * self.node_count + destination.index()) * self.neighbours.len() + k
    }

    pub fn get(&self, destination: NodeId, neighbour: NodeId) -> f64 {
        self.values[self.slot(Feature::Low, destination, neighbour)]
    }

    pub fn get_with(&self, feature: Feature, destination: NodeId, neighbour: NodeId) -> f64 {
        self.values[self.slot(feature, destination, neighbour)]
    }

    pub fn update(&mut self, destination: NodeId, neighbour: NodeId, reward: f64, alpha: f64) {
        self.update_with(Feature::Low, destination, neighbour, reward, alpha);
    }

    pub fn update_with(&mut self, feature: Feature, destination: NodeId, neighbour: NodeId, reward: f64, alpha: f64) {
        let i = self.slot(feature, destination, neighbour);
        self.values[i] = update_q(self.values[i], reward, alpha);
    }

    /// Best estimate towards `destination` over all neighbours.
    pub fn max_towards(&self, destination: NodeId) -> f64 {
        self.neighbours
            .iter()
            .map(|&n| self.get(destination, n))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
