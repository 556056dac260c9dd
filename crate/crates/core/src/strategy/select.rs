use alloc::vec::Vec;

use rand::Rng;

use crate::topology::NodeId;

/// Boltzmann distribution over `values` at temperature `tau`. The row
/// maximum is subtracted before exponentiation.
pub fn boltzmann_probabilities(values: &[f64], tau: f64) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = values.iter().map(|&q| libm::exp((q - max) / tau)).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Samples a neighbour from `candidates` (neighbour, Q value) with
/// probability proportional to `exp(Q / tau)`, skipping `exclude`.
/// Returns `None` when nothing is eligible.
pub fn select_neighbor<R: Rng + ?Sized>(
    candidates: &[(NodeId, f64)],
    exclude: Option<NodeId>,
    tau: f64,
    rng: &mut R,
) -> Option<NodeId> {
    let eligible = || candidates.iter().filter(move |(n, _)| Some(*n) != exclude);
    let max = eligible().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let total: f64 = eligible().map(|c| libm::exp((c.1 - max) / tau)).sum();
    let mut target = rng.random::<f64>() * total;
    let mut last = None;
    for &(n, q) in eligible() {
        let w = libm::exp((q - max) / tau);
        if target < w {
            return Some(n);
        }
        target -= w;
        last = Some(n);
    }
    // Rounding left a sliver of mass past the last candidate.
    last
}
