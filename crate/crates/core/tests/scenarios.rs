//! Hand-scripted runs on small graphs where routing is forced, checked
//! against hand-computed outcomes.

use callroute_core::strategy::QTable;
use callroute_core::{CallId, MessageKind, NodeId, SimConfig, StrategyKind, Topology, World};

fn path_graph(n: u32) -> Topology {
    let edges: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Topology::new(n as usize, &edges, None, None).unwrap()
}

/// Practically no random traffic: everything is injected.
fn quiet(strategy: StrategyKind, capacity: u32, setup_time: u64) -> SimConfig {
    let mut c = SimConfig::with_setup_time(strategy, setup_time, 1e-12, 10_000);
    c.capacity = capacity;
    c.params.usage_threshold = c.params.usage_threshold.min(f64::from(capacity) / 2.0);
    c
}

fn steps(w: &mut World<'_>, n: usize) {
    for _ in 0..n {
        w.step().unwrap();
    }
}

fn snapshot(w: &World<'_>) -> Vec<QTable> {
    w.topology().nodes().map(|n| w.q_table(n).clone()).collect()
}

#[test]
fn idle_world_only_advances_the_clock() {
    let topo = path_graph(4);
    let mut w = World::new(&topo, quiet(StrategyKind::PtcM, 10, 10)).unwrap().with_audit(true);
    steps(&mut w, 50);
    assert_eq!(w.tick(), 50);
    assert_eq!(w.live_calls().count(), 0);
    assert!(w.in_flight().is_empty());
    assert!(w.nodes().iter().all(|n| n.free() == 10));
}

/// Background calls from node 0 hold 3, 2, 1 and 0 units at nodes 1..4
/// when the traced call from 0 to 4 starts at tick 10. Only an end node of
/// a path has a single way to go, so every call starts at node 0.
fn traced_ptc_run(strategy: StrategyKind) -> (Vec<QTable>, Vec<QTable>, [f64; 4]) {
    let topo = path_graph(5);
    let mut w = World::new(&topo, quiet(strategy, 10, 20)).unwrap().with_audit(true);
    for d in 1..=3 {
        w.inject_call(NodeId(0), NodeId(d), 5000).unwrap();
    }
    steps(&mut w, 10);
    let before = snapshot(&w);
    let main = w.inject_call(NodeId(0), NodeId(4), 5000).unwrap();
    // Forwarding reaches the destination on tick 14.
    steps(&mut w, 4);
    assert!(snapshot(&w) == before, "no learning before the connect message exists");
    steps(&mut w, 1);
    assert_eq!(w.call(main).unwrap().connected_at, Some(14));
    assert_eq!(w.node(NodeId(4)).allocated(), 1);
    // The connect message reaches node 3 on tick 15.
    steps(&mut w, 1);
    assert_eq!((w.node(NodeId(3)).pre_allocated(), w.node(NodeId(3)).allocated()), (0, 2));
    assert_eq!(w.node(NodeId(2)).pre_allocated(), 1);
    let connects: Vec<_> = w.in_flight().iter().filter(|m| m.kind == MessageKind::Connect).collect();
    assert_eq!(connects.len(), 1);
    assert_eq!(connects[0].to, NodeId(2));
    steps(&mut w, 3);
    assert_eq!(w.call(main).unwrap().circuit_at, Some(18));
    let states = [w.node(NodeId(1)).state(), w.node(NodeId(2)).state(), w.node(NodeId(3)).state(), w.node(NodeId(4)).state()];
    (before, snapshot(&w), states)
}

fn check_trace(rewards: [f64; 4], before: &[QTable], after: &[QTable]) {
    let dest = NodeId(4);
    for i in 0..4u32 {
        let next = NodeId(i + 1);
        let q0 = before[i as usize].get(dest, next);
        let expected = 0.97 * q0 + 0.03 * rewards[i as usize];
        let got = after[i as usize].get(dest, next);
        assert!((got - expected).abs() < 1e-12, "node {i}: {got} vs {expected}");
    }
}

#[test]
fn ptc_m_connect_trace_on_a_path() {
    let (before, after, states) = traced_ptc_run(StrategyKind::PtcM);
    assert_eq!(states, [0.6, 0.7, 0.8, 0.9]);
    // Node 3 sees {s4}; node 2 {s4, s3}; node 1 adds s2; node 0 adds s1.
    check_trace([0.6, 0.7, 0.8, 0.9], &before, &after);
}

#[test]
fn ptc_a_connect_trace_on_a_path() {
    let (before, after, _) = traced_ptc_run(StrategyKind::PtcA);
    check_trace([(0.9 + 0.8 + 0.7 + 0.6) / 4.0, (0.9 + 0.8 + 0.7) / 3.0, 0.85, 0.9], &before, &after);
}

#[test]
fn ptc_counts_one_message_per_connect_hop() {
    let topo = path_graph(6);
    let mut w = World::new(&topo, quiet(StrategyKind::PtcM, 10, 20)).unwrap();
    w.inject_call(NodeId(0), NodeId(5), 100).unwrap();
    steps(&mut w, 30);
    assert_eq!(w.metrics().nc, 1);
    assert_eq!(w.metrics().messages, 5);
}

#[test]
fn ptc_counts_nothing_for_a_failed_call() {
    let topo = path_graph(6);
    let mut w = World::new(&topo, quiet(StrategyKind::PtcM, 10, 3)).unwrap().with_audit(true);
    w.inject_call(NodeId(0), NodeId(5), 100).unwrap();
    steps(&mut w, 30);
    assert_eq!(w.metrics().nc, 0);
    assert_eq!(w.metrics().messages, 0);
    assert_eq!(w.diagnostics().drops_deadline, 1);
    assert!(w.nodes().iter().all(|n| n.free() == 10));
}

#[test]
fn qr_counts_one_feedback_per_forwarding_hop() {
    let topo = path_graph(6);
    let mut w = World::new(&topo, quiet(StrategyKind::Qr, 1, 20)).unwrap().with_audit(true);
    // Occupies nodes 4 and 5 for the rest of the run.
    w.inject_call(NodeId(5), NodeId(4), 9000).unwrap();
    steps(&mut w, 5);
    assert_eq!(w.metrics().messages, 1);
    w.inject_call(NodeId(0), NodeId(5), 100).unwrap();
    steps(&mut w, 20);
    // Hops 0-1, 1-2, 2-3 and 3-4, then node 4 is full.
    assert_eq!(w.metrics().messages, 5);
    assert_eq!(w.diagnostics().drops_capacity, 1);
    assert_eq!(w.metrics().nc, 1);
}

#[test]
fn qr_feedback_updates_the_sender() {
    let topo = path_graph(3);
    let mut w = World::new(&topo, quiet(StrategyKind::Qr, 10, 20)).unwrap();
    let q0 = w.q_table(NodeId(0)).get(NodeId(2), NodeId(1));
    w.inject_call(NodeId(0), NodeId(2), 100).unwrap();
    // Node 1 pre-allocates on tick 1 after answering with min(s1 = 1.0, 0.5).
    steps(&mut w, 3);
    let q = w.q_table(NodeId(0)).get(NodeId(2), NodeId(1));
    assert!((q - (0.97 * q0 + 0.03 * 0.5)).abs() < 1e-12);
}

#[test]
fn tpot_dispatches_one_reward_per_stashed_call() {
    let topo = path_graph(5);
    let mut w = World::new(&topo, quiet(StrategyKind::TpotRl, 10, 20)).unwrap().with_audit(true);
    for (s, d) in [(0, 4), (0, 3), (4, 1)] {
        w.inject_call(NodeId(s), NodeId(d), 5000).unwrap();
    }
    steps(&mut w, 100);
    let stashed: usize = topo.nodes().map(|n| w.stash_len(n)).sum();
    assert_eq!(stashed, 3);
    // Tick 100 is a dispatch tick.
    steps(&mut w, 1);
    let rewards = w.in_flight().iter().filter(|m| m.kind == MessageKind::Reward).count();
    assert_eq!(rewards, 3);
    assert_eq!(topo.nodes().map(|n| w.stash_len(n)).sum::<usize>(), 0);
    // Nothing stashed, nothing sent.
    steps(&mut w, 100);
    assert_eq!(w.in_flight().iter().filter(|m| m.kind == MessageKind::Reward).count(), 0);
}

#[test]
fn izds_finds_a_path_on_the_tick_capacity_frees() {
    let topo = path_graph(7);
    let mut w = World::new(&topo, quiet(StrategyKind::PtcM, 1, 20)).unwrap().with_audit(true);
    // Holds nodes 5 and 6 from tick 2 until it terminates on tick 5.
    w.inject_call(NodeId(6), NodeId(5), 3).unwrap();
    steps(&mut w, 1);
    let main = w.inject_call(NodeId(0), NodeId(6), 100).unwrap();
    steps(&mut w, 4);
    assert_eq!(w.node(NodeId(5)).free(), 0);
    assert!(!w.call(main).unwrap().izds_found);
    steps(&mut w, 1);
    assert_eq!(w.node(NodeId(5)).free(), 1);
    assert!(w.call(main).unwrap().izds_found);
    steps(&mut w, 10);
    assert_eq!(w.metrics().nc, 2);
    assert_eq!(w.nc_izds(), 2);
}

#[test]
fn per_distance_counts_match_hand_count() {
    let topo = path_graph(5);
    // A setup budget of two ticks lets only calls within two hops connect.
    let mut w = World::new(&topo, quiet(StrategyKind::PtcA, 10, 2)).unwrap().with_audit(true);
    let calls = [(0, 1), (0, 2), (0, 3), (0, 4), (4, 3), (4, 2), (4, 1), (4, 0), (0, 1), (4, 3)];
    for (s, d) in calls {
        w.inject_call(NodeId(s), NodeId(d), 50).unwrap();
    }
    steps(&mut w, 100);
    let m = w.metrics();
    assert_eq!(m.no, 10);
    assert_eq!(&m.no_d[1..], &[4, 2, 2, 2]);
    assert_eq!(&m.nc_d[1..], &[4, 2, 0, 0]);
    assert_eq!(m.per_distance_rates(), vec![(1, 1.0), (2, 1.0), (3, 0.0), (4, 0.0)]);
    assert_eq!(m.nc_d.iter().sum::<u64>(), m.nc);
    assert!(w.nc_izds() >= m.nc);
}

#[test]
fn full_node_drops_at_once() {
    let topo = path_graph(3);
    let mut w = World::new(&topo, quiet(StrategyKind::PtcM, 1, 20)).unwrap().with_audit(true);
    w.inject_call(NodeId(2), NodeId(1), 1000).unwrap();
    steps(&mut w, 5);
    let id = w.inject_call(NodeId(0), NodeId(1), 10).unwrap();
    steps(&mut w, 2);
    // Node 1 refused on tick 6; the drop message is on its way to node 0.
    let drops: Vec<_> = w.in_flight().iter().filter(|m| m.kind == MessageKind::Drop).collect();
    assert_eq!(drops.len(), 1);
    assert_eq!(drops[0].to, NodeId(0));
    assert_eq!(w.node(NodeId(1)).allocated(), 1);
    steps(&mut w, 1);
    assert!(w.call(id).is_none());
    assert_eq!(w.node(NodeId(0)).free(), 1);
}

#[test]
fn injected_calls_are_validated() {
    let topo = path_graph(3);
    let mut w = World::new(&topo, quiet(StrategyKind::PtcM, 1, 20)).unwrap();
    assert!(w.inject_call(NodeId(1), NodeId(1), 5).is_err());
    assert!(w.inject_call(NodeId(0), NodeId(9), 5).is_err());
    assert!(w.inject_call(NodeId(0), NodeId(1), 0).is_err());
    assert_eq!(w.inject_call(NodeId(0), NodeId(1), 5).unwrap(), CallId(0));
}
