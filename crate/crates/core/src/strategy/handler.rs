//! Per-message agent behaviour. Every handler runs at `msg.to` on the tick
//! the message arrives.

use alloc::vec::Vec;

use super::{
    compute_penalty, qr_feedback, reward_ptc_a, reward_ptc_m, select_neighbor, Feature, StashedCall, StrategyKind,
};
use crate::error::SimError;
use crate::sim::{CallId, CallStatus, HoldId, Message, MessageKind, World};
use crate::topology::NodeId;

pub(crate) fn handle_message(w: &mut World<'_>, msg: Message) -> Result<(), SimError> {
    match msg.kind {
        MessageKind::Forward => {
            let sender = msg.from;
            on_forward(w, msg, Some(sender))
        }
        MessageKind::Connect => on_connect(w, msg),
        MessageKind::Drop => on_drop(w, msg),
        MessageKind::Penalty => on_penalty(w, msg),
        MessageKind::Reward => {
            on_reward(w, msg);
            Ok(())
        }
        MessageKind::Feedback => {
            let alpha = w.config.params.alpha;
            w.q[msg.to.index()].update(msg.destination, msg.from, msg.payload[0], alpha);
            Ok(())
        }
    }
}

/// The source acts on a freshly originated call within the same tick.
pub(crate) fn start_call(w: &mut World<'_>, id: CallId) -> Result<(), SimError> {
    let c = &w.calls[&id];
    let msg = Message::new(MessageKind::Forward, id, c.source, c.source, c.destination);
    on_forward(w, msg, None)
}

fn on_forward(w: &mut World<'_>, mut msg: Message, sender: Option<NodeId>) -> Result<(), SimError> {
    let i = msg.to;
    let id = msg.call;
    let dest = msg.destination;
    let strategy = w.config.strategy;
    let Some(call) = w.calls.get(&id) else {
        return Err(SimError::Invariant(alloc::format!("forward request for unknown call {id}")));
    };
    debug_assert!(call.is_open());
    let expired = w.tick > call.t_o + call.t_live;

    if let (StrategyKind::Qr, Some(j)) = (strategy, sender) {
        let e = qr_feedback(w.nodes[i.index()].state(), &w.q[i.index()], i, dest);
        let mut reply = Message::new(MessageKind::Feedback, id, i, j, dest);
        reply.payload.push(e);
        w.send(reply);
    }

    let loop_pos = msg.position_of(i);
    if expired {
        w.diagnostics.drops_deadline += 1;
        return drop_call(w, msg);
    }
    if loop_pos.is_none() && w.nodes[i.index()].free() == 0 {
        w.diagnostics.drops_capacity += 1;
        return drop_call(w, msg);
    }

    let mut kept: Option<HoldId> = None;
    if let Some(pos) = loop_pos {
        w.diagnostics.loops_detected += 1;
        let upstream = *msg.path.last().expect("a loop implies a non-empty path");
        let mut mp = Message::new(MessageKind::Penalty, id, i, upstream, dest);
        mp.path = msg.path[pos..].to_vec();
        mp.holds = msg.holds[pos..].to_vec();
        if strategy == StrategyKind::TpotRl {
            mp.features = msg.features[pos..].to_vec();
        }
        mp.penalty = compute_penalty(0);
        mp.loop_source = Some(i);
        w.send(mp);

        w.mark_excised(id, &msg.holds[pos + 1..])?;
        // `i` keeps the unit it reserved on its first visit.
        kept = Some(msg.holds[pos]);
        msg.path.truncate(pos);
        msg.holds.truncate(pos);
        msg.payload.truncate(pos.min(msg.payload.len()));
        msg.features.truncate(pos.min(msg.features.len()));
    }

    if i == dest {
        return connect_at_destination(w, msg);
    }

    let upstream = msg.path.last().copied();
    let feature_of = |w: &World<'_>, j: NodeId| -> Feature {
        let tpot = w.tpot.as_ref().expect("TPOT-RL state");
        let k = w.topo.neighbour_index(i, j).expect("neighbour");
        tpot.monitors[i.index()].feature(k, w.config.params.usage_threshold)
    };
    let candidates: Vec<(NodeId, f64)> = w
        .topo
        .neighbours(i)
        .iter()
        .filter(|&&j| Some(j) != upstream)
        .map(|&j| {
            let q = if strategy == StrategyKind::TpotRl {
                w.q[i.index()].get_with(feature_of(w, j), dest, j)
            } else {
                w.q[i.index()].get(dest, j)
            };
            (j, q)
        })
        .collect();
    let tau = w.config.params.tau;
    let Some(j) = select_neighbor(&candidates, upstream, tau, &mut w.agent_rng) else {
        if let Some(h) = kept {
            w.release(id, h)?;
        }
        w.diagnostics.drops_dead_end += 1;
        return drop_call(w, msg);
    };

    let hold = match kept {
        Some(h) => {
            w.redirect(id, h, j)?;
            h
        }
        None => w.pre_allocate(id, i, j)?,
    };
    msg.path.push(i);
    msg.holds.push(hold);
    let tpot = strategy == StrategyKind::TpotRl;
    if tpot {
        let e = feature_of(w, j);
        msg.payload.push(w.q[i.index()].get_with(e, dest, j));
        msg.features.push(e);
    }
    let call = w.calls.get_mut(&id).expect("checked above");
    call.path.clone_from(&msg.path);
    call.path.push(j);
    msg.from = i;
    msg.to = j;
    w.send(msg);
    Ok(())
}

/// `msg.path` and `msg.holds` cover every node still holding a unit for the
/// forwarding attempt.
fn drop_call(w: &mut World<'_>, msg: Message) -> Result<(), SimError> {
    let id = msg.call;
    let tick = w.tick;
    let call = w.calls.get_mut(&id).expect("dropping a live call");
    call.set_status(CallStatus::Dropped)?;
    call.resolved_at = Some(tick);
    call.path.clone_from(&msg.path);
    match msg.path.last() {
        None => finish_drop(w, id)?,
        Some(&prev) => {
            let mut md = Message::new(MessageKind::Drop, id, msg.to, prev, msg.destination);
            md.path = msg.path;
            md.holds = msg.holds;
            w.send(md);
        }
    }
    Ok(())
}

fn finish_drop(w: &mut World<'_>, id: CallId) -> Result<(), SimError> {
    w.diagnostics.completed_drops += 1;
    if let Some(c) = w.calls.get(&id) {
        if c.holds.iter().any(|h| !h.excised) {
            return Err(SimError::Invariant(alloc::format!("call {id} dropped but still holds units on its route")));
        }
        if !c.holds.is_empty() {
            w.diagnostics.drop_leaks += 1;
            w.diagnostics.leaked_units += c.holds.len() as u64;
        }
    }
    w.retire_if_done(id);
    Ok(())
}

fn connect_at_destination(w: &mut World<'_>, mut msg: Message) -> Result<(), SimError> {
    let i = msg.to;
    let id = msg.call;
    let tick = w.tick;
    let hold = w.allocate_fresh(id, i)?;
    let call = w.calls.get_mut(&id).expect("live call");
    if tick > call.t_o + call.t_live {
        return Err(SimError::Invariant(alloc::format!("call {id} connected after its setup deadline")));
    }
    call.set_status(CallStatus::Connected)?;
    call.connected_at = Some(tick);
    call.resolved_at = Some(tick);
    call.path.clone_from(&msg.path);
    call.path.push(i);
    let (t_o, distance) = (call.t_o, call.distance);
    w.metrics.record_connect(t_o, distance);

    let strategy = w.config.strategy;
    let own = w.nodes[i.index()].state();
    let prev = *msg.path.last().expect("source is never the destination");
    msg.path.push(i);
    msg.holds.push(hold);
    let mut mc = Message::new(MessageKind::Connect, id, i, prev, msg.destination);
    match strategy {
        StrategyKind::PtcA | StrategyKind::PtcM => mc.payload.push(own),
        StrategyKind::TpotRl => {
            let estimates = core::mem::take(&mut msg.payload);
            let stashed = StashedCall {
                call: id,
                destination: msg.destination,
                path: msg.path.clone(),
                estimates,
                features: core::mem::take(&mut msg.features),
            };
            w.tpot.as_mut().expect("TPOT-RL state").stash[i.index()].push(stashed);
        }
        StrategyKind::Qr => {}
    }
    mc.path = msg.path;
    mc.holds = msg.holds;
    w.send(mc);
    Ok(())
}

fn on_connect(w: &mut World<'_>, mut msg: Message) -> Result<(), SimError> {
    let i = msg.to;
    let id = msg.call;
    if !w.calls.contains_key(&id) {
        w.diagnostics.stale_messages += 1;
        return Ok(());
    }
    let p = msg.position_of(i).expect("connect reaches a node on its path");
    w.commit(id, msg.holds[p])?;
    let strategy = w.config.strategy;
    if strategy.is_ptc() {
        let reward = match strategy {
            StrategyKind::PtcA => reward_ptc_a(&msg.payload),
            _ => reward_ptc_m(&msg.payload),
        };
        let alpha = w.config.params.alpha;
        w.q[i.index()].update(msg.destination, msg.path[p + 1], reward, alpha);
        msg.payload.push(w.nodes[i.index()].state());
    }
    if p == 0 {
        return w.schedule_termination(id);
    }
    msg.from = i;
    msg.to = msg.path[p - 1];
    w.send(msg);
    Ok(())
}

fn on_drop(w: &mut World<'_>, mut msg: Message) -> Result<(), SimError> {
    let i = msg.to;
    let id = msg.call;
    let p = msg.position_of(i).expect("drop reaches a node on its path");
    if w.calls.contains_key(&id) {
        w.release(id, msg.holds[p])?;
    } else {
        w.diagnostics.stale_messages += 1;
    }
    if p == 0 {
        return finish_drop(w, id);
    }
    msg.from = i;
    msg.to = msg.path[p - 1];
    w.send(msg);
    Ok(())
}

fn on_penalty(w: &mut World<'_>, mut msg: Message) -> Result<(), SimError> {
    let i = msg.to;
    let id = msg.call;
    let loop_source = msg.loop_source.expect("penalty names its loop source");
    let p = msg.position_of(i).expect("penalty reaches a node on the loop");
    let next = msg.path.get(p + 1).copied().unwrap_or(loop_source);
    let alpha = w.config.params.alpha;
    if w.config.strategy == StrategyKind::TpotRl {
        w.q[i.index()].update_with(msg.features[p], msg.destination, next, msg.penalty, alpha);
    } else {
        w.q[i.index()].update(msg.destination, next, msg.penalty, alpha);
    }
    if i == loop_source {
        return Ok(());
    }
    if w.calls.contains_key(&id) {
        w.release(id, msg.holds[p])?;
        w.retire_if_done(id);
    } else {
        w.diagnostics.stale_messages += 1;
    }
    msg.penalty = compute_penalty((msg.path.len() - p) as u32);
    msg.from = i;
    msg.to = msg.path[p - 1];
    w.send(msg);
    Ok(())
}

fn on_reward(w: &mut World<'_>, mut msg: Message) {
    let i = msg.to;
    let p = msg.position_of(i).expect("reward reaches a node on its path");
    // Only forwarding nodes append estimates; the hop into the destination
    // has nothing downstream to learn from.
    let downstream = &msg.payload[p + 1..];
    if !downstream.is_empty() {
        let alpha = w.config.params.alpha;
        let reward = reward_ptc_m(downstream);
        w.q[i.index()].update_with(msg.features[p], msg.destination, msg.path[p + 1], reward, alpha);
    }
    if p > 0 {
        msg.from = i;
        msg.to = msg.path[p - 1];
        w.send(msg);
    }
}

/// Sends one reward message upstream for every call each node stashed
/// since the previous dispatch.
pub(crate) fn dispatch_tpot_rewards(w: &mut World<'_>) {
    let Some(tpot) = w.tpot.as_mut() else { return };
    let stashed: Vec<StashedCall> = tpot.stash.iter_mut().flat_map(|s| s.drain()).collect();
    for s in stashed {
        let n = s.path.len();
        let mut m = Message::new(MessageKind::Reward, s.call, s.path[n - 1], s.path[n - 2], s.destination);
        m.path = s.path;
        m.payload = s.estimates;
        m.features = s.features;
        w.send(m);
    }
}
