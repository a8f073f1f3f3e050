use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{FlowCounts, FlowStats, Interval};
use crate::net::{build_dumbbell, Addr, ForwardOutcome, LinkId, NodeId, Packet, PacketKind, QueueStats, Topology};
use crate::sim::{EventHandle, Scheduler, SimTime};
use crate::tcp::{CbrSource, SenderAction, SenderStats, TcpReceiver, TcpSender};
use crate::trace::TraceSink;

use super::{Experiment, FlowKind, FlowSpec, Scenario, SimParams};

/// Lifetime packet counts of one flow. At the end of a run
/// `sent == received + dropped + in_flight`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlowTotals {
    pub sent: u64,
    pub received: u64,
    pub dropped: u64,
    pub in_flight: u64,
}

#[derive(Debug, Clone)]
pub struct FlowReport {
    pub spec: FlowSpec,
    /// Measurement-window statistics from the simulator's own counters.
    pub stats: FlowStats,
    pub totals: FlowTotals,
    pub sender: Option<SenderStats>,
    /// Segments handed to the receiving application, in order.
    pub delivered_segments: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub scenario: Scenario,
    pub interval: Interval,
    pub flows: Vec<FlowReport>,
    pub events: u64,
    /// Queue statistics of the N2 -> N3 bottleneck direction.
    pub bottleneck: QueueStats,
}

impl RunOutcome {
    pub fn flow(&self, flow_id: u32) -> Option<&FlowReport> {
        self.flows.iter().find(|f| f.spec.flow_id == flow_id)
    }

    pub fn tcp_flows(&self) -> impl Iterator<Item = &FlowReport> {
        self.flows.iter().filter(|f| f.spec.is_tcp())
    }
}

/// Window over which whole-run statistics are reported: after the warm-up
/// for experiments 1 and 2, after the CBR onset for experiment 3.
pub fn measurement_interval(scenario: &Scenario, params: &SimParams) -> Result<Interval> {
    let start = match scenario.experiment {
        Experiment::Queueing => scenario.cbr_start,
        _ => params.warmup,
    };
    Interval::from_secs(start, scenario.duration)
}

#[derive(Debug)]
enum Ev {
    Arrive { link: LinkId, packet: Packet },
    LinkFree(LinkId),
    CbrSend(usize),
    TcpStart(usize),
    Rto(usize),
}

struct TcpAgent {
    spec: FlowSpec,
    sender: TcpSender,
    receiver: TcpReceiver,
    timer: Option<EventHandle>,
    delivered_upto: u64,
}

struct CbrAgent {
    spec: FlowSpec,
    source: CbrSource,
}

#[derive(Default)]
struct Live {
    totals: FlowTotals,
    window: FlowCounts,
}

struct World<'a> {
    topo: Topology,
    rng: ChaCha8Rng,
    sink: &'a mut dyn TraceSink,
    tcp: Vec<TcpAgent>,
    cbr: Vec<CbrAgent>,
    live: BTreeMap<u32, Live>,
    interval: Interval,
    next_uid: u64,
    ack_size: u32,
}

fn addr(node: NodeId, port: u32) -> Addr {
    Addr::new(node, port)
}

impl World<'_> {
    fn live(&mut self, flow_id: u32) -> &mut Live {
        self.live.entry(flow_id).or_default()
    }

    fn new_packet(&mut self, spec: &FlowSpec, kind: PacketKind, size: u32, seq: u64, now: SimTime) -> Packet {
        let uid = self.next_uid;
        self.next_uid += 1;
        Packet {
            uid,
            flow_id: spec.flow_id,
            kind,
            size,
            src: addr(spec.src, spec.port),
            dst: addr(spec.dst, spec.port),
            seq,
            created_at: now,
            sack: Vec::new(),
        }
    }

    fn send_data(&mut self, sched: &mut Scheduler<Ev>, packet: Packet) -> Result<()> {
        let now = sched.now();
        let in_window = self.interval.contains(now);
        let live = self.live(packet.flow_id);
        live.totals.sent += 1;
        if in_window {
            live.window.sent += 1;
        }
        let at = packet.src.node_id();
        self.inject(sched, packet, at)
    }

    fn inject(&mut self, sched: &mut Scheduler<Ev>, packet: Packet, at: NodeId) -> Result<()> {
        let now = sched.now();
        let outcome = self.topo.forward(packet, at, now, &mut self.rng, self.sink)?;
        self.on_outcome(sched, outcome)
    }

    fn on_outcome(&mut self, sched: &mut Scheduler<Ev>, outcome: ForwardOutcome) -> Result<()> {
        match outcome {
            ForwardOutcome::Delivered(p) => self.deliver(sched, p),
            ForwardOutcome::Enqueued(link) => {
                self.kick(sched, link);
                Ok(())
            }
            ForwardOutcome::Dropped { packet, .. } => {
                if packet.kind.is_data() {
                    let in_window = self.interval.contains(sched.now());
                    let live = self.live(packet.flow_id);
                    live.totals.dropped += 1;
                    if in_window {
                        live.window.dropped += 1;
                    }
                }
                Ok(())
            }
        }
    }

    fn kick(&mut self, sched: &mut Scheduler<Ev>, link: LinkId) {
        if let Some(tx) = self.topo.start_transmission(link, sched.now(), self.sink) {
            // both instants are >= now by construction
            sched
                .schedule_at(tx.tx_end, Ev::LinkFree(link))
                .expect("transmission ends in the future");
            sched
                .schedule_at(
                    tx.deliver_at,
                    Ev::Arrive {
                        link,
                        packet: tx.packet,
                    },
                )
                .expect("delivery in the future");
        }
    }

    fn tcp_index(&self, flow_id: u32) -> Result<usize> {
        self.tcp
            .iter()
            .position(|a| a.spec.flow_id == flow_id)
            .ok_or_else(|| Error::Invariant(format!("packet for unknown TCP flow {flow_id}")))
    }

    fn deliver(&mut self, sched: &mut Scheduler<Ev>, p: Packet) -> Result<()> {
        let now = sched.now();
        if p.kind.is_data() {
            let in_window = self.interval.contains(now);
            let latency = (now - p.created_at).as_secs_f64();
            let live = self.live(p.flow_id);
            live.totals.received += 1;
            if in_window {
                live.window.record_received(p.size, Some(latency));
            }
        }
        match p.kind {
            PacketKind::Cbr => Ok(()),
            PacketKind::Tcp => {
                let i = self.tcp_index(p.flow_id)?;
                let agent = &mut self.tcp[i];
                if p.seq >= agent.sender.snd_max() {
                    return Err(Error::Invariant(format!(
                        "flow {} received segment {} that was never sent",
                        p.flow_id, p.seq
                    )));
                }
                let info = agent.receiver.on_data(p.seq);
                if info.delivered.start != agent.delivered_upto || info.delivered.end < info.delivered.start {
                    return Err(Error::Invariant(format!(
                        "flow {} delivered {:?} after {}",
                        p.flow_id, info.delivered, agent.delivered_upto
                    )));
                }
                agent.delivered_upto = info.delivered.end;
                let ack = Packet {
                    uid: self.next_uid,
                    flow_id: p.flow_id,
                    kind: PacketKind::Ack,
                    size: self.ack_size,
                    src: p.dst,
                    dst: p.src,
                    seq: info.ack,
                    created_at: now,
                    sack: info.sack,
                };
                self.next_uid += 1;
                self.inject(sched, ack, p.dst.node_id())
            }
            PacketKind::Ack => {
                let i = self.tcp_index(p.flow_id)?;
                let actions = self.tcp[i].sender.on_ack(p.seq, &p.sack, now)?;
                self.apply(sched, i, actions)
            }
        }
    }

    fn apply(&mut self, sched: &mut Scheduler<Ev>, i: usize, actions: Vec<SenderAction>) -> Result<()> {
        let now = sched.now();
        let spec = self.tcp[i].spec;
        let size = self.tcp[i].sender.config().segment_size;
        for a in actions {
            match a {
                SenderAction::Send { seq, .. } => {
                    let p = self.new_packet(&spec, PacketKind::Tcp, size, seq, now);
                    self.send_data(sched, p)?;
                }
                SenderAction::ArmTimer(after) => {
                    if let Some(h) = self.tcp[i].timer.take() {
                        sched.cancel(h);
                    }
                    self.tcp[i].timer = Some(sched.schedule(after, Ev::Rto(i)));
                }
                SenderAction::CancelTimer => {
                    if let Some(h) = self.tcp[i].timer.take() {
                        sched.cancel(h);
                    }
                }
            }
        }
        Ok(())
    }

    fn handle(&mut self, sched: &mut Scheduler<Ev>, ev: Ev) -> Result<()> {
        let now = sched.now();
        match ev {
            Ev::Arrive { link, packet } => {
                let outcome = self.topo.receive(link, packet, now, &mut self.rng, self.sink)?;
                self.on_outcome(sched, outcome)?;
            }
            Ev::LinkFree(link) => {
                self.topo.finish_transmission(link);
                self.kick(sched, link);
            }
            Ev::CbrSend(i) => {
                if let Some((seq, next)) = self.cbr[i].source.emit(now, &mut self.rng) {
                    let spec = self.cbr[i].spec;
                    let size = self.cbr[i].source.packet_size;
                    let p = self.new_packet(&spec, PacketKind::Cbr, size, seq, now);
                    self.send_data(sched, p)?;
                    if let Some(at) = next {
                        sched.schedule_at(at, Ev::CbrSend(i))?;
                    }
                }
            }
            Ev::TcpStart(i) => {
                let actions = self.tcp[i].sender.fill(now);
                self.apply(sched, i, actions)?;
            }
            Ev::Rto(i) => {
                self.tcp[i].timer = None;
                let actions = self.tcp[i].sender.on_timeout(now);
                self.apply(sched, i, actions)?;
            }
        }
        self.check_queues()
    }

    fn check_queues(&self) -> Result<()> {
        for l in self.topo.links() {
            let q = l.queue();
            if q.len() > q.discipline().limit() {
                return Err(Error::Invariant(format!(
                    "queue {} -> {} holds {} packets, limit {}",
                    l.from,
                    l.to,
                    q.len(),
                    q.discipline().limit()
                )));
            }
        }
        Ok(())
    }
}

/// Runs one scenario to completion, writing every trace record to `sink`.
///
/// Fails with [`Error::Invariant`] if packet conservation, a queue bound or
/// in-order delivery is violated at any point.
pub fn simulate(scenario: &Scenario, params: &SimParams, sink: &mut dyn TraceSink) -> Result<RunOutcome> {
    params.validate()?;
    let flows = scenario.flows()?;
    let interval = measurement_interval(scenario, params)?;
    let topo = build_dumbbell(
        params.bandwidth_bps(),
        params.prop_delay()?,
        params.queue(scenario.queue)?,
        params.edge_queue(),
    )?;
    let end = SimTime::from_secs_f64(scenario.duration)?;

    let mut world = World {
        topo,
        rng: ChaCha8Rng::seed_from_u64(scenario.seed),
        sink,
        tcp: Vec::new(),
        cbr: Vec::new(),
        live: BTreeMap::new(),
        interval,
        next_uid: 0,
        ack_size: params.tcp.ack_size,
    };
    let mut sched: Scheduler<Ev> = Scheduler::new();
    for spec in &flows {
        world.live.insert(spec.flow_id, Live::default());
        let start = SimTime::from_secs_f64(spec.start)?;
        match spec.kind {
            FlowKind::Tcp(variant) => {
                sched.schedule_at(start, Ev::TcpStart(world.tcp.len()))?;
                world.tcp.push(TcpAgent {
                    spec: *spec,
                    sender: TcpSender::new(variant, params.tcp),
                    receiver: TcpReceiver::new(variant.uses_sack()),
                    timer: None,
                    delivered_upto: 0,
                });
            }
            FlowKind::Cbr { rate_mbps } => {
                let source =
                    CbrSource::new(rate_mbps * 1e6, params.cbr_packet_size, start, end)?.with_jitter(params.cbr_jitter)?;
                sched.schedule_at(start, Ev::CbrSend(world.cbr.len()))?;
                world.cbr.push(CbrAgent { spec: *spec, source });
            }
        }
    }

    let stats = sched.run_until(end, |sched, ev| world.handle(sched, ev))?;

    // whatever is still queued or on the wire
    let mut in_flight: BTreeMap<u32, u64> = BTreeMap::new();
    let pending = sched.pending().filter_map(|ev| match ev {
        Ev::Arrive { packet, .. } => Some(packet),
        _ => None,
    });
    for p in world.topo.queued_packets().chain(pending) {
        if p.kind.is_data() {
            *in_flight.entry(p.flow_id).or_default() += 1;
        }
    }

    let mut reports = Vec::with_capacity(flows.len());
    for spec in &flows {
        let live = &world.live[&spec.flow_id];
        let mut totals = live.totals;
        totals.in_flight = in_flight.get(&spec.flow_id).copied().unwrap_or(0);
        if totals.sent != totals.received + totals.dropped + totals.in_flight {
            return Err(Error::Invariant(format!(
                "flow {} does not conserve packets: {totals:?}",
                spec.flow_id
            )));
        }
        let agent = world.tcp.iter().find(|a| a.spec.flow_id == spec.flow_id);
        reports.push(FlowReport {
            spec: *spec,
            stats: live.window.stats(spec.flow_id, interval),
            totals,
            sender: agent.map(|a| a.sender.stats()),
            delivered_segments: agent.map(|a| a.delivered_upto),
        });
    }
    let bottleneck = world
        .topo
        .link_between(NodeId::N2, NodeId::N3)
        .map(|l| world.topo.link(l).queue().stats())
        .ok_or_else(|| Error::Invariant("dumbbell lost its bottleneck".into()))?;

    Ok(RunOutcome {
        scenario: scenario.clone(),
        interval,
        flows: reports,
        events: stats.events_processed,
        bottleneck,
    })
}
