use super::QTable;
use crate::topology::NodeId;

/// PTC-A: mean of the downstream node states.
///
/// # Panics
/// On an empty list.
pub fn reward_ptc_a(states: &[f64]) -> f64 {
    assert!(!states.is_empty(), "PTC-A reward needs at least one state");
    states.iter().sum::<f64>() / states.len() as f64
}

/// PTC-M: minimum of the downstream node states.
///
/// # Panics
/// On an empty list.
pub fn reward_ptc_m(states: &[f64]) -> f64 {
    assert!(!states.is_empty(), "PTC-M reward needs at least one state");
    states.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Q-routing reply of the forwarded-to neighbour: the smaller of its own
/// state and its best estimate towards the destination. A destination
/// answers with its own state.
pub fn qr_feedback(state: f64, q: &QTable, owner: NodeId, destination: NodeId) -> f64 {
    if owner == destination {
        return state;
    }
    state.min(q.max_towards(destination))
}

/// Loop penalty `-0.9^(x+1)` at `x` hops from the node that detected the loop.
pub fn compute_penalty(hops_from_loop_end: u32) -> f64 {
    -libm::pow(0.9, f64::from(hops_from_loop_end) + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Topology;

    #[test]
    fn aggregates() {
        let s = [0.5, 0.3, 0.8];
        assert!((reward_ptc_a(&s) - 1.6 / 3.0).abs() < 1e-15);
        assert_eq!(reward_ptc_m(&s), 0.3);
        assert_eq!(reward_ptc_a(&[1.0; 4]), 1.0);
        assert_eq!(reward_ptc_m(&[0.7]), 0.7);
    }

    #[test]
    #[should_panic]
    fn empty_average_is_a_contract_violation() {
        reward_ptc_a(&[]);
    }

    #[test]
    fn penalty_values() {
        assert!((compute_penalty(0) + 0.9).abs() < 1e-15);
        assert!((compute_penalty(1) + 0.81).abs() < 1e-15);
        for x in 0..20 {
            let (a, b) = (compute_penalty(x), compute_penalty(x + 1));
            assert!(a > -1.0 && a < 0.0);
            assert!(b.abs() < a.abs());
        }
    }

    #[test]
    fn feedback_takes_minimum() {
        let topo = Topology::new(3, &[(0, 1), (1, 2)], None, None).unwrap();
        let mut q = QTable::new(&topo, NodeId(1), false, 0.5);
        q.update(NodeId(2), NodeId(2), 1.0, 1.0);
        assert_eq!(qr_feedback(0.2, &q, NodeId(1), NodeId(2)), 0.2);
        q.update(NodeId(2), NodeId(2), 0.6, 1.0);
        q.update(NodeId(2), NodeId(0), 0.4, 1.0);
        assert_eq!(qr_feedback(1.0, &q, NodeId(1), NodeId(2)), 0.6);
        assert_eq!(qr_feedback(0.3, &q, NodeId(1), NodeId(1)), 0.3);
    }
}
