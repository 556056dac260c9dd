use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Geometric;

use super::{Call, CallId, CallStatus, DurationModel, Hold, HoldId, HoldKind, Message, NodeState, SimConfig, Tick};
use crate::error::SimError;
use crate::metrics::{count_reward_message, MetricAccumulators, RunReport};
use crate::oracle::IzdsTracker;
use crate::strategy::{self, LinkUsageMonitor, QTable, RewardStash, StrategyKind};
use crate::topology::{HopDistanceTable, NodeId, Topology};

/// Counters that never influence the simulation itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunDiagnostics {
    /// Messages whose call or reservation no longer existed.
    pub stale_messages: u64,
    /// Drops whose `m_d` reached the source while nodes of an excised loop
    /// still held units awaiting their penalty message.
    pub drop_leaks: u64,
    /// Units still held at those moments.
    pub leaked_units: u64,
    /// Drops whose `m_d` reached the source.
    pub completed_drops: u64,
    /// Ticks on which the full bandwidth audit ran.
    pub audited_ticks: u64,
    pub loops_detected: u64,
    /// Forwarding attempts abandoned at the setup deadline.
    pub drops_deadline: u64,
    /// Forwarding attempts that met a node without a free unit.
    pub drops_capacity: u64,
    /// Forwarding attempts left with no neighbour to try.
    pub drops_dead_end: u64,
}

pub(crate) struct TpotState {
    pub(crate) monitors: Vec<LinkUsageMonitor>,
    /// Units held at each node for calls routed via each neighbour.
    pub(crate) via: Vec<Vec<u32>>,
    pub(crate) stash: Vec<RewardStash>,
}

/// Complete state of one simulation run.
pub struct World<'t> {
    pub(crate) topo: &'t Topology,
    pub(crate) hops: HopDistanceTable,
    pub(crate) config: SimConfig,
    pub(crate) tick: Tick,
    pub(crate) nodes: Vec<NodeState>,
    pub(crate) q: Vec<QTable>,
    pub(crate) tpot: Option<TpotState>,
    /// Messages sent on the current tick, delivered on the next.
    outbox: Vec<Message>,
    next_seq: u64,
    pub(crate) calls: BTreeMap<CallId, Call>,
    next_call: u64,
    next_hold: u64,
    ends: BTreeMap<Tick, Vec<CallId>>,
    /// Scripted calls waiting for the next origination phase.
    injected: Vec<(CallId, NodeId, NodeId, Tick)>,
    traffic_rng: ChaCha8Rng,
    pub(crate) agent_rng: ChaCha8Rng,
    pub(crate) metrics: MetricAccumulators,
    izds: IzdsTracker,
    pub(crate) diagnostics: RunDiagnostics,
    audit: bool,
}

impl<'t> World<'t> {
    pub fn new(topo: &'t Topology, config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let with_features = config.strategy == StrategyKind::TpotRl;
        let q = topo
            .nodes()
            .map(|n| QTable::new(topo, n, with_features, config.params.q_init))
            .collect();
        let tpot = with_features.then(|| TpotState {
            monitors: topo
                .nodes()
                .map(|n| LinkUsageMonitor::new(topo.degree(n), config.params.activity_window))
                .collect(),
            via: topo.nodes().map(|n| vec![0; topo.degree(n)]).collect(),
            stash: vec![RewardStash::default(); topo.node_count()],
        });
        let hops = topo.min_hop_distances();
        let metrics = MetricAccumulators::new(config.metrics_window, config.total_ticks, hops.diameter());
        Ok(World {
            topo,
            hops,
            nodes: vec![NodeState::new(config.capacity); topo.node_count()],
            q,
            tpot,
            outbox: Vec::new(),
            next_seq: 0,
            calls: BTreeMap::new(),
            next_call: 0,
            next_hold: 0,
            ends: BTreeMap::new(),
            injected: Vec::new(),
            traffic_rng: ChaCha8Rng::seed_from_u64(config.seed),
            agent_rng: ChaCha8Rng::seed_from_u64(config.seed ^ 0xA6E7_5EED_0000_0001),
            metrics,
            izds: IzdsTracker::default(),
            diagnostics: RunDiagnostics::default(),
            audit: false,
            tick: 0,
            config,
        })
    }

    /// Audit bandwidth bookkeeping against call reservations every tick.
    pub fn with_audit(mut self, on: bool) -> Self {
        self.audit = on;
        self
    }

    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn topology(&self) -> &Topology {
        self.topo
    }

    pub fn hop_distances(&self) -> &HopDistanceTable {
        &self.hops
    }

    pub fn node(&self, n: NodeId) -> &NodeState {
        &self.nodes[n.index()]
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn q_table(&self, n: NodeId) -> &QTable {
        &self.q[n.index()]
    }

    pub fn call(&self, id: CallId) -> Option<&Call> {
        self.calls.get(&id)
    }

    /// Calls still holding units or awaiting an outcome.
    pub fn live_calls(&self) -> impl Iterator<Item = &Call> {
        self.calls.values()
    }

    /// Messages that will be delivered on the next tick.
    pub fn in_flight(&self) -> &[Message] {
        &self.outbox
    }

    pub fn metrics(&self) -> &MetricAccumulators {
        &self.metrics
    }

    pub fn diagnostics(&self) -> &RunDiagnostics {
        &self.diagnostics
    }

    pub fn nc_izds(&self) -> u64 {
        self.izds.nc_izds()
    }

    pub fn stash_len(&self, n: NodeId) -> usize {
        self.tpot.as_ref().map_or(0, |t| t.stash[n.index()].len())
    }

    pub fn link_usage(&self, n: NodeId, neighbour: NodeId) -> Option<u32> {
        let k = self.topo.neighbour_index(n, neighbour)?;
        self.tpot.as_ref().map(|t| t.via[n.index()][k])
    }

    pub fn strategy(&self) -> StrategyKind {
        self.config.strategy
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.config.total_ticks
    }

    /// Runs to `total_ticks` and summarises.
    pub fn run(mut self) -> Result<RunReport, SimError> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(self.report())
    }

    pub fn report(&self) -> RunReport {
        RunReport::new(
            self.config.strategy,
            self.config.seed,
            self.config.total_ticks,
            self.metrics.clone(),
            self.izds.nc_izds(),
            self.diagnostics.clone(),
        )
    }

    /// Advances one tick:
    /// 1. terminate calls whose holding time expired,
    /// 2. deliver this tick's messages in creation order,
    /// 3. TPOT-RL link monitoring and periodic reward dispatch,
    /// 4. originate new calls,
    /// 5. IZDS search for open calls,
    /// 6. audit,
    /// 7. advance the clock.
    pub fn step(&mut self) -> Result<(), SimError> {
        if self.is_finished() {
            return Err(SimError::Invariant("step past total_ticks".into()));
        }
        self.terminate_expired()?;

        let inbox = core::mem::take(&mut self.outbox);
        for msg in inbox {
            debug_assert_eq!(msg.arrival, self.tick);
            strategy::handle_message(self, msg)?;
        }

        if self.tpot.is_some() {
            self.monitor_links();
            if self.tick % self.config.params.update_interval == 0 {
                strategy::dispatch_tpot_rewards(self);
            }
        }

        for (id, source, destination, duration) in core::mem::take(&mut self.injected) {
            self.originate(id, source, destination, duration)?;
        }
        let p = self.config.load_schedule.probability_at(self.tick);
        self.originate_calls(p)?;
        self.izds_tick();
        if self.audit {
            self.audit_bandwidth()?;
        }
        self.tick += 1;
        Ok(())
    }

    /// One Bernoulli trial; on success a call with uniform distinct
    /// endpoints starts at its source.
    pub(crate) fn originate_calls(&mut self, p: f64) -> Result<(), SimError> {
        let trial = Bernoulli::new(p).map_err(|_| SimError::Config(format!("bad probability {p}")))?;
        if !trial.sample(&mut self.traffic_rng) {
            return Ok(());
        }
        let n = self.topo.node_count() as u32;
        let source = self.traffic_rng.random_range(0..n);
        let mut destination = self.traffic_rng.random_range(0..n - 1);
        if destination >= source {
            destination += 1;
        }
        let duration = sample_duration(&mut self.traffic_rng, self.config.mean_duration, self.config.duration_model);
        let id = self.next_call_id();
        self.originate(id, NodeId(source), NodeId(destination), duration)
    }

    fn next_call_id(&mut self) -> CallId {
        let id = CallId(self.next_call);
        self.next_call += 1;
        id
    }

    /// Queues a specific call to originate in the next step's origination
    /// phase, ahead of any random origination.
    pub fn inject_call(&mut self, source: NodeId, destination: NodeId, duration: Tick) -> Result<CallId, SimError> {
        let n = self.topo.node_count();
        if source == destination || source.index() >= n || destination.index() >= n || duration == 0 {
            return Err(SimError::Config("injected call needs distinct in-range endpoints and a positive duration".into()));
        }
        let id = self.next_call_id();
        self.injected.push((id, source, destination, duration));
        Ok(id)
    }

    fn originate(&mut self, id: CallId, source: NodeId, destination: NodeId, duration: Tick) -> Result<(), SimError> {
        debug_assert_ne!(source, destination);
        let distance = self.hops.get(source, destination);
        let call = Call {
            id,
            source,
            destination,
            t_o: self.tick,
            t_live: self.config.setup_time,
            duration,
            distance,
            status: CallStatus::Forwarding,
            path: Vec::new(),
            holds: Vec::new(),
            connected_at: None,
            circuit_at: None,
            resolved_at: None,
            izds_found: false,
        };
        self.metrics.record_origination(self.tick, distance);
        self.calls.insert(id, call);
        // The search also runs once before the source reserves anything.
        self.izds_check(id, &self.free_units());
        strategy::start_call(self, id)
    }

    fn terminate_expired(&mut self) -> Result<(), SimError> {
        let Some(ids) = self.ends.remove(&self.tick) else { return Ok(()) };
        for id in ids {
            let Some(call) = self.calls.get_mut(&id) else {
                return Err(SimError::Invariant(format!("terminating unknown call {id}")));
            };
            call.set_status(CallStatus::Terminated)?;
            let circuit: Vec<HoldId> =
                call.holds.iter().filter(|h| h.kind == HoldKind::Alloc).map(|h| h.id).collect();
            for h in circuit {
                self.release(id, h)?;
            }
            self.retire_if_done(id);
        }
        Ok(())
    }

    fn monitor_links(&mut self) {
        let Some(tpot) = self.tpot.as_mut() else { return };
        for (monitor, usage) in tpot.monitors.iter_mut().zip(&tpot.via) {
            monitor.record(usage);
        }
    }

    fn free_units(&self) -> Vec<u32> {
        self.nodes.iter().map(NodeState::free).collect()
    }

    /// Searches for calls that were open at some point this tick.
    fn izds_tick(&mut self) {
        let free = self.free_units();
        let tick = self.tick;
        let pending: Vec<CallId> = self
            .calls
            .values()
            .filter(|c| !c.izds_found && (c.is_open() || c.resolved_at == Some(tick)))
            .map(|c| c.id)
            .collect();
        for id in pending {
            self.izds_check(id, &free);
        }
    }

    fn izds_check(&mut self, id: CallId, free: &[u32]) {
        let Some(call) = self.calls.get_mut(&id) else { return };
        if self.izds.observe(self.topo, free, call) {
            self.metrics.record_izds(call.t_o);
        }
    }

    fn audit_bandwidth(&mut self) -> Result<(), SimError> {
        let n = self.nodes.len();
        let mut pre = vec![0u32; n];
        let mut alloc = vec![0u32; n];
        for call in self.calls.values() {
            let mut seen_path = Vec::new();
            for h in &call.holds {
                match h.kind {
                    HoldKind::Pre => pre[h.node.index()] += 1,
                    HoldKind::Alloc => alloc[h.node.index()] += 1,
                }
            }
            for w in call.path.windows(2) {
                if !self.topo.is_edge(w[0], w[1]) {
                    return Err(SimError::Invariant(format!("call {} path hop {}-{} is not a link", call.id, w[0], w[1])));
                }
            }
            // While forwarding, the last entry may be a revisit not yet detected.
            let settled = if call.is_open() { call.path.len().saturating_sub(1) } else { call.path.len() };
            for &p in &call.path[..settled] {
                if seen_path.contains(&p) {
                    return Err(SimError::Invariant(format!("call {} path repeats node {p}", call.id)));
                }
                seen_path.push(p);
            }
            if call.path.first().is_some_and(|&s| s != call.source) {
                return Err(SimError::Invariant(format!("call {} path does not start at its source", call.id)));
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.pre_allocated() != pre[i] || node.allocated() != alloc[i] {
                return Err(SimError::Invariant(format!(
                    "tick {}: node {i} counts {}/{} pre/alloc but calls hold {}/{}",
                    self.tick,
                    node.pre_allocated(),
                    node.allocated(),
                    pre[i],
                    alloc[i]
                )));
            }
            if node.allocated() + node.pre_allocated() > node.capacity() {
                return Err(SimError::Invariant(format!("tick {}: node {i} over capacity", self.tick)));
            }
        }
        if let Some(tpot) = &self.tpot {
            for node in self.topo.nodes() {
                let mut via = vec![0u32; self.topo.degree(node)];
                for h in self.calls.values().flat_map(|c| &c.holds).filter(|h| h.node == node) {
                    if let Some(v) = h.via {
                        via[self.topo.neighbour_index(node, v).expect("via is a neighbour")] += 1;
                    }
                }
                if via != tpot.via[node.index()] {
                    return Err(SimError::Invariant(format!("tick {}: link usage mismatch at node {node}", self.tick)));
                }
            }
        }
        self.diagnostics.audited_ticks += 1;
        Ok(())
    }

    // ---- messaging ----

    /// Queues `msg` for delivery on the next tick.
    pub(crate) fn send(&mut self, mut msg: Message) {
        debug_assert!(self.topo.is_edge(msg.from, msg.to), "message between non-neighbours");
        msg.sent = self.tick;
        msg.arrival = self.tick + 1;
        msg.seq = self.next_seq;
        self.next_seq += 1;
        if count_reward_message(self.config.strategy, msg.kind) == 1 {
            self.metrics.record_message(self.tick);
        }
        self.outbox.push(msg);
    }

    // ---- bandwidth ----

    fn call_mut(&mut self, id: CallId) -> Result<&mut Call, SimError> {
        self.calls.get_mut(&id).ok_or_else(|| SimError::Invariant(format!("unknown call {id}")))
    }

    fn new_hold(&mut self) -> HoldId {
        let id = HoldId(self.next_hold);
        self.next_hold += 1;
        id
    }

    fn adjust_via(&mut self, node: NodeId, via: Option<NodeId>, delta: i32) {
        if let (Some(tpot), Some(v)) = (self.tpot.as_mut(), via) {
            let k = self.topo.neighbour_index(node, v).expect("via is a neighbour");
            let slot = &mut tpot.via[node.index()][k];
            *slot = slot.checked_add_signed(delta).expect("link usage underflow");
        }
    }

    pub(crate) fn pre_allocate(&mut self, call: CallId, node: NodeId, via: NodeId) -> Result<HoldId, SimError> {
        self.nodes[node.index()]
            .pre_allocate()
            .map_err(|error| SimError::Bandwidth { node, call, error })?;
        let id = self.new_hold();
        self.call_mut(call)?.holds.push(Hold { id, node, kind: HoldKind::Pre, via: Some(via), excised: false });
        self.adjust_via(node, Some(via), 1);
        Ok(id)
    }

    pub(crate) fn allocate_fresh(&mut self, call: CallId, node: NodeId) -> Result<HoldId, SimError> {
        self.nodes[node.index()]
            .allocate()
            .map_err(|error| SimError::Bandwidth { node, call, error })?;
        let id = self.new_hold();
        self.call_mut(call)?.holds.push(Hold { id, node, kind: HoldKind::Alloc, via: None, excised: false });
        Ok(id)
    }

    pub(crate) fn commit(&mut self, call: CallId, hold: HoldId) -> Result<(), SimError> {
        let c = self.call_mut(call)?;
        let h = c.hold_mut(hold).ok_or(SimError::UnknownHold { node: NodeId(u32::MAX), call })?;
        if h.kind != HoldKind::Pre {
            return Err(SimError::Invariant(format!("call {call}: committing a unit that is not pre-allocated")));
        }
        h.kind = HoldKind::Alloc;
        let node = h.node;
        self.nodes[node.index()].commit().map_err(|error| SimError::Bandwidth { node, call, error })
    }

    pub(crate) fn mark_excised(&mut self, call: CallId, holds: &[HoldId]) -> Result<(), SimError> {
        let c = self.call_mut(call)?;
        for &h in holds {
            c.hold_mut(h).ok_or(SimError::UnknownHold { node: NodeId(u32::MAX), call })?.excised = true;
        }
        Ok(())
    }

    /// Points an existing reservation at a different next hop.
    pub(crate) fn redirect(&mut self, call: CallId, hold: HoldId, via: NodeId) -> Result<(), SimError> {
        let c = self.call_mut(call)?;
        let h = c.hold_mut(hold).ok_or(SimError::UnknownHold { node: NodeId(u32::MAX), call })?;
        let (node, old) = (h.node, h.via);
        h.via = Some(via);
        self.adjust_via(node, old, -1);
        self.adjust_via(node, Some(via), 1);
        Ok(())
    }

    pub(crate) fn release(&mut self, call: CallId, hold: HoldId) -> Result<(), SimError> {
        let c = self.call_mut(call)?;
        let h = c.take_hold(hold).ok_or(SimError::UnknownHold { node: NodeId(u32::MAX), call })?;
        let state = &mut self.nodes[h.node.index()];
        let r = match h.kind {
            HoldKind::Pre => state.release_pre_allocated(),
            HoldKind::Alloc => state.release_allocated(),
        };
        r.map_err(|error| SimError::Bandwidth { node: h.node, call, error })?;
        self.adjust_via(h.node, h.via, -1);
        Ok(())
    }

    /// Removes a finished call once no node holds anything for it.
    pub(crate) fn retire_if_done(&mut self, id: CallId) {
        if let Some(c) = self.calls.get(&id) {
            if matches!(c.status, CallStatus::Dropped | CallStatus::Terminated) && c.holds.is_empty() {
                self.calls.remove(&id);
            }
        }
    }

    /// Records that the circuit is complete at the source.
    pub(crate) fn schedule_termination(&mut self, id: CallId) -> Result<(), SimError> {
        let tick = self.tick;
        let c = self.call_mut(id)?;
        c.circuit_at = Some(tick);
        let end = tick + c.duration;
        self.ends.entry(end).or_default().push(id);
        Ok(())
    }
}

/// Draws a holding time with the configured mean; always at least one tick.
pub fn sample_duration<R: Rng + ?Sized>(rng: &mut R, mean: f64, model: DurationModel) -> Tick {
    match model {
        DurationModel::Fixed => libm::round(mean).max(1.0) as Tick,
        DurationModel::Geometric => {
            let p = 1.0 / mean;
            let failures = Geometric::new(p).expect("mean >= 1").sample(rng);
            failures.saturating_add(1)
        }
    }
}
