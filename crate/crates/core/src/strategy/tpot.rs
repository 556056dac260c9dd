use alloc::vec;
use alloc::vec::Vec;

use crate::sim::CallId;
use crate::topology::NodeId;

/// Action-dependent usage feature of the link to one neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    Low = 0,
    High = 1,
}

/// Ring buffers of the per-tick units a node holds for calls routed via
/// each of its neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkUsageMonitor {
    window: usize,
    cursor: usize,
    samples: Vec<Vec<u32>>,
    sums: Vec<u64>,
}

impl LinkUsageMonitor {
    pub fn new(neighbours: usize, window: usize) -> Self {
        LinkUsageMonitor { window, cursor: 0, samples: vec![vec![0; window]; neighbours], sums: vec![0; neighbours] }
    }

    /// Pushes one tick of usage, one entry per neighbour.
    pub fn record(&mut self, usage: &[u32]) {
        debug_assert_eq!(usage.len(), self.samples.len());
        for (k, &u) in usage.iter().enumerate() {
            let slot = &mut self.samples[k][self.cursor];
            self.sums[k] = self.sums[k] - u64::from(*slot) + u64::from(u);
            *slot = u;
        }
        self.cursor = (self.cursor + 1) % self.window;
    }

    /// Mean usage over the window. Ticks not yet observed count as zero.
    pub fn mean_usage(&self, neighbour_index: usize) -> f64 {
        self.sums[neighbour_index] as f64 / self.window as f64
    }

    /// `High` iff the mean usage strictly exceeds `threshold`.
    pub fn feature(&self, neighbour_index: usize, threshold: f64) -> Feature {
        if self.mean_usage(neighbour_index) > threshold {
            Feature::High
        } else {
            Feature::Low
        }
    }
}

/// A connected call remembered by its destination until the next reward
/// dispatch.
#[derive(Debug, Clone, PartialEq)]
pub struct StashedCall {
    pub call: CallId,
    pub destination: NodeId,
    /// Route from source to destination.
    pub path: Vec<NodeId>,
    /// `estimates[k]` was appended by `path[k]`; the last entry is the
    /// destination's own state.
    pub estimates: Vec<f64>,
    /// Feature each forwarding node acted under.
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RewardStash {
    pub calls: Vec<StashedCall>,
}

impl RewardStash {
    pub fn push(&mut self, call: StashedCall) {
        self.calls.push(call);
    }

    pub fn drain(&mut self) -> Vec<StashedCall> {
        core::mem::take(&mut self.calls)
    }

    pub fn len(&self) -> usize {
        self.calls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.calls.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cold_monitor_reads_low() {
        let m = LinkUsageMonitor::new(3, 100);
        for k in 0..3 {
            assert_eq!(m.feature(k, 5.0), Feature::Low);
        }
    }

    #[test]
    fn threshold_is_strict() {
        let mut m = LinkUsageMonitor::new(2, 100);
        for _ in 0..100 {
            m.record(&[6, 5]);
        }
        assert_eq!(m.feature(0, 5.0), Feature::High);
        assert_eq!(m.mean_usage(1), 5.0);
        assert_eq!(m.feature(1, 5.0), Feature::Low);
    }

    #[test]
    fn window_forgets_old_samples() {
        let mut m = LinkUsageMonitor::new(1, 4);
        for _ in 0..4 {
            m.record(&[10]);
        }
        assert_eq!(m.mean_usage(0), 10.0);
        for _ in 0..3 {
            m.record(&[0]);
        }
        assert_eq!(m.mean_usage(0), 2.5);
        m.record(&[0]);
        assert_eq!(m.mean_usage(0), 0.0);
    }
}
