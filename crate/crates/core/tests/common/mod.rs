//! Deliberately naive reference implementations used only by tests. None of
//! them share code with the library beyond its public types.

#![allow(dead_code)]

use std::collections::BTreeMap;

use callroute_core::{NodeId, Topology};

/// Replays the request/response timeline of nearest-neighbour sharing along
/// a chain `a_1 .. a_{k+1}` and returns how old `a_1`'s information about
/// `a_{k+1}` is at the moment `a_1` receives the response for the last task.
///
/// `task_times` are the tick each task starts at `a_1`, oldest first. For a
/// task starting at `T`, `a_j` sends its request to `a_{j+1}` at
/// `T + (j-1) dt`; the request arrives `dt` later and `a_{j+1}` replies at
/// once with its own state sampled then, plus whatever it learned from its
/// own request for the previous task. The reply arrives `dt` after that.
pub fn nn_trace_staleness(task_times: &[u64], dt: u64, k: u64) -> i64 {
    let agents = k as usize + 1;
    // Each reply records the responder's own sample tick and points at the
    // reply it received for the previous task. The timeline bookkeeping
    // follows that pointer even when, with t_c < 2 dt, the earlier response
    // is still in transit, so links are resolved after the replay.
    struct Reply {
        responder: usize,
        sampled: u64,
        received: u64,
    }
    let mut replies: BTreeMap<(usize, usize), Reply> = BTreeMap::new();
    // (tick, creation order, responder, task, is_response)
    let mut events: Vec<(u64, u64, usize, usize, bool)> = Vec::new();
    let mut order = 0u64;
    for (m, &t) in task_times.iter().enumerate() {
        for j in 0..agents - 1 {
            let request_sent = t + j as u64 * dt;
            events.push((request_sent + dt, order, j + 1, m, false));
            order += 1;
        }
    }
    while !events.is_empty() {
        events.sort_by_key(|e| (e.0, e.1));
        let (now, _, responder, task, is_response) = events.remove(0);
        if is_response {
            replies.get_mut(&(responder - 1, task)).unwrap().received = now;
        } else {
            replies.insert((responder - 1, task), Reply { responder, sampled: now, received: 0 });
            events.push((now + dt, order, responder, task, true));
            order += 1;
        }
    }
    // Follow the chain of replies back from a_1's last one.
    let last = task_times.len() - 1;
    let receive = replies[&(0, last)].received;
    let (mut agent, mut task) = (0usize, last);
    loop {
        let r = &replies[&(agent, task)];
        if r.responder == k as usize {
            return receive as i64 - r.sampled as i64;
        }
        agent = r.responder;
        task -= 1;
    }
}

/// Enough periodic tasks for information from `k` hops away to reach `a_1`.
pub fn periodic_tasks(t_c: u64, k: u64) -> Vec<u64> {
    let first = 10 * t_c * (k + 1);
    (0..=k).map(|m| first + m * t_c).collect()
}

/// Task start times whose gaps, most recent first, are `intervals`.
pub fn tasks_from_intervals(intervals: &[u64]) -> Vec<u64> {
    let total: u64 = intervals.iter().sum();
    let mut t = total + 1000;
    let mut times = vec![t];
    for &gap in intervals {
        t -= gap;
        times.push(t);
    }
    times.reverse();
    times
}

/// Replays the post-completion cascade along a chain `a_1 .. a_n`: the last
/// agent sends its state when the task completes and every agent, on
/// receipt, appends its own state sampled then and forwards one hop back.
/// Returns how old `a_1`'s copy of `a_{k+1}`'s state is on arrival.
pub fn ptc_trace_staleness(dt: u64, k: u64) -> i64 {
    let n = k as usize + 1;
    let complete_at = 1000u64;
    // (arrival tick, recipient, carried samples)
    let mut in_flight: Vec<(u64, usize, Vec<(usize, u64)>)> = vec![(complete_at + dt, n - 2, vec![(n - 1, complete_at)])];
    loop {
        let (now, at, mut carried) = in_flight.remove(0);
        if at == 0 {
            let sampled = carried.iter().find(|(a, _)| *a == k as usize).unwrap().1;
            return now as i64 - sampled as i64;
        }
        carried.push((at, now));
        in_flight.push((now + dt, at - 1, carried));
    }
}

/// Counts size-`h+1` subsets of state durations fitting within `t_d` by
/// walking every bitmask.
pub fn coverage_enumeration(durations: &[u64], t_d: u64, h: usize) -> (u128, u128) {
    let m = durations.len();
    let mut fits = 0u128;
    let mut total = 0u128;
    for mask in 0u32..(1u32 << m) {
        if mask.count_ones() as usize != h + 1 {
            continue;
        }
        total += 1;
        let sum: u64 = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| durations[i]).sum();
        if sum <= t_d {
            fits += 1;
        }
    }
    (fits, total)
}

/// Whether some simple path from `s` to `d` uses only nodes with a free
/// unit, found by enumerating simple paths depth first.
pub fn brute_force_path_exists(topo: &Topology, free: &[u32], s: NodeId, d: NodeId) -> bool {
    fn walk(topo: &Topology, free: &[u32], at: NodeId, d: NodeId, on_path: &mut Vec<bool>) -> bool {
        if free[at.index()] == 0 {
            return false;
        }
        if at == d {
            return true;
        }
        on_path[at.index()] = true;
        for &n in topo.neighbours(at) {
            if !on_path[n.index()] && walk(topo, free, n, d, on_path) {
                return true;
            }
        }
        on_path[at.index()] = false;
        false
    }
    walk(topo, free, s, d, &mut vec![false; topo.node_count()])
}

/// Unit-weight all-pairs shortest paths.
pub fn floyd_warshall(topo: &Topology) -> Vec<Vec<u64>> {
    let n = topo.node_count();
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in topo.edges() {
        d[a.index()][b.index()] = 1;
        d[b.index()][a.index()] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Builds an arbitrary connected graph on `n` nodes: a random spanning tree
/// plus extra edges, from a simple LCG so the test owns its randomness.
pub fn random_connected_graph(n: usize, extra: usize, seed: u64) -> Topology {
    let mut lcg = Lcg(seed.wrapping_mul(2).wrapping_add(1));
    let mut edges = std::collections::BTreeSet::new();
    for i in 1..n {
        let j = lcg.below(i as u64) as u32;
        edges.insert((j, i as u32));
    }
    for _ in 0..extra {
        let a = lcg.below(n as u64) as u32;
        let b = lcg.below(n as u64) as u32;
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let edges: Vec<(u32, u32)> = edges.into_iter().collect();
    Topology::new(n, &edges, None, None).unwrap()
}

pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 42) as f64
    }
}
