use std::collections::VecDeque;
use std::fmt;
use std::time::Duration;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{serialization_delay, SimTime};
use crate::trace::{TraceEvent, TraceRecord, TraceSink};

use super::queue::{DropReason, PacketQueue, QueueDiscipline};
use super::Packet;

/// Node index; the dumbbell uses 0..=5 for N1..N6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const N1: NodeId = NodeId(0);
    pub const N2: NodeId = NodeId(1);
    pub const N3: NodeId = NodeId(2);
    pub const N4: NodeId = NodeId(3);
    pub const N5: NodeId = NodeId(4);
    pub const N6: NodeId = NodeId(5);

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.0 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub usize);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkStats {
    pub offered: u64,
    pub dropped: u64,
    pub delivered: u64,
}

/// Directed, store-and-forward, non-preemptive link with an egress queue.
#[derive(Debug, Clone)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    pub bandwidth_bps: f64,
    pub prop_delay: Duration,
    queue: PacketQueue,
    busy_until: SimTime,
    transmitting: bool,
    stats: LinkStats,
}

impl Link {
    fn new(from: NodeId, to: NodeId, bandwidth_bps: f64, prop_delay: Duration, queue: QueueDiscipline) -> Self {
        let typical_tx = serialization_delay(1000, bandwidth_bps);
        Link {
            from,
            to,
            bandwidth_bps,
            prop_delay,
            queue: PacketQueue::new(queue, typical_tx),
            busy_until: SimTime::ZERO,
            transmitting: false,
            stats: LinkStats::default(),
        }
    }

    pub fn queue(&self) -> &PacketQueue {
        &self.queue
    }

    pub fn stats(&self) -> LinkStats {
        self.stats
    }

    pub fn busy_until(&self) -> SimTime {
        self.busy_until
    }

    /// Reserves the link for one packet. Returns `(tx_end, delivery_time)`:
    /// transmission starts at `max(now, busy_until)`, serializes at the link
    /// rate, then propagates.
    pub fn transmit(&mut self, size: u32, now: SimTime) -> (SimTime, SimTime) {
        let start = now.max(self.busy_until);
        let tx_end = start + serialization_delay(size, self.bandwidth_bps);
        self.busy_until = tx_end;
        (tx_end, tx_end + self.prop_delay)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForwardOutcome {
    /// The packet reached its destination node.
    Delivered(Packet),
    /// Accepted by the egress queue of this link.
    Enqueued(LinkId),
    Dropped { link: LinkId, packet: Packet, reason: DropReason },
}

/// A packet that just left a queue and is on the wire.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub link: LinkId,
    pub packet: Packet,
    pub tx_end: SimTime,
    pub deliver_at: SimTime,
}

#[derive(Debug, Clone)]
pub struct Topology {
    node_count: usize,
    links: Vec<Link>,
    /// `next_hop[node][dst]`
    next_hop: Vec<Vec<Option<LinkId>>>,
}

impl Topology {
    /// Builds a topology from duplex edges. Each edge becomes two directed
    /// links sharing bandwidth, delay and queue configuration.
    pub fn from_edges(
        node_count: usize,
        edges: &[(NodeId, NodeId, QueueDiscipline)],
        bandwidth_bps: f64,
        prop_delay: Duration,
    ) -> Result<Self> {
        if !(bandwidth_bps.is_finite() && bandwidth_bps > 0.0) {
            return Err(Error::config(format!("link bandwidth must be > 0, got {bandwidth_bps}")));
        }
        let mut links = Vec::with_capacity(edges.len() * 2);
        for &(a, b, q) in edges {
            if a.0 >= node_count || b.0 >= node_count || a == b {
                return Err(Error::config(format!("bad edge {a}-{b}")));
            }
            q.validate()?;
            links.push(Link::new(a, b, bandwidth_bps, prop_delay, q));
            links.push(Link::new(b, a, bandwidth_bps, prop_delay, q));
        }
        let next_hop = (0..node_count).map(|src| bfs_next_hops(node_count, &links, NodeId(src))).collect();
        Ok(Topology {
            node_count,
            links,
            next_hop,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.0]
    }

    pub fn link_between(&self, from: NodeId, to: NodeId) -> Option<LinkId> {
        self.links
            .iter()
            .position(|l| l.from == from && l.to == to)
            .map(LinkId)
    }

    pub fn next_link(&self, at: NodeId, dst: NodeId) -> Option<LinkId> {
        self.next_hop.get(at.0)?.get(dst.0).copied().flatten()
    }

    /// Node sequence a packet from `src` to `dst` traverses.
    pub fn route(&self, src: NodeId, dst: NodeId) -> Result<Vec<NodeId>> {
        let mut path = vec![src];
        let mut at = src;
        while at != dst {
            let link = self
                .next_link(at, dst)
                .ok_or_else(|| Error::config(format!("no route from {src} to {dst}")))?;
            at = self.links[link.0].to;
            path.push(at);
            if path.len() > self.node_count {
                return Err(Error::config(format!("routing loop from {src} to {dst}")));
            }
        }
        Ok(path)
    }

    /// Sum of propagation plus serialization along the route for a packet of `size` bytes.
    pub fn min_one_way_delay(&self, src: NodeId, dst: NodeId, size: u32) -> Result<Duration> {
        let path = self.route(src, dst)?;
        Ok(path
            .windows(2)
            .map(|w| {
                let l = &self.links[self.link_between(w[0], w[1]).expect("route uses links").0];
                l.prop_delay + serialization_delay(size, l.bandwidth_bps)
            })
            .sum())
    }

    /// Hands a packet to the node `at`: delivery if it is the destination,
    /// otherwise an offer to the egress queue toward the destination.
    /// Traces `+` for every offer and `d` for a rejected one.
    pub fn forward<R: Rng + ?Sized>(
        &mut self,
        packet: Packet,
        at: NodeId,
        now: SimTime,
        rng: &mut R,
        sink: &mut dyn TraceSink,
    ) -> Result<ForwardOutcome> {
        let dst = packet.dst.node_id();
        if at == dst {
            return Ok(ForwardOutcome::Delivered(packet));
        }
        let link_id = self
            .next_link(at, dst)
            .ok_or_else(|| Error::config(format!("no route from {at} to {dst}")))?;
        let link = &mut self.links[link_id.0];
        link.stats.offered += 1;
        sink.record(&TraceRecord::for_packet(TraceEvent::Enqueue, now, link.from, link.to, &packet));
        match link.queue.offer(packet, now, rng) {
            Ok(()) => Ok(ForwardOutcome::Enqueued(link_id)),
            Err((packet, reason)) => {
                link.stats.dropped += 1;
                sink.record(&TraceRecord::for_packet(TraceEvent::Drop, now, link.from, link.to, &packet));
                Ok(ForwardOutcome::Dropped {
                    link: link_id,
                    packet,
                    reason,
                })
            }
        }
    }

    /// A packet finished propagating over `link`: traces `r` at the far end and forwards it.
    pub fn receive<R: Rng + ?Sized>(
        &mut self,
        link_id: LinkId,
        packet: Packet,
        now: SimTime,
        rng: &mut R,
        sink: &mut dyn TraceSink,
    ) -> Result<ForwardOutcome> {
        let link = &mut self.links[link_id.0];
        link.stats.delivered += 1;
        let at = link.to;
        sink.record(&TraceRecord::for_packet(TraceEvent::Receive, now, link.from, link.to, &packet));
        self.forward(packet, at, now, rng, sink)
    }

    /// Starts serializing the head-of-line packet if the link is idle. Traces `-`.
    pub fn start_transmission(
        &mut self,
        link_id: LinkId,
        now: SimTime,
        sink: &mut dyn TraceSink,
    ) -> Option<Transmission> {
        let link = &mut self.links[link_id.0];
        if link.transmitting {
            return None;
        }
        let packet = link.queue.pop(now)?;
        sink.record(&TraceRecord::for_packet(TraceEvent::Dequeue, now, link.from, link.to, &packet));
        let (tx_end, deliver_at) = link.transmit(packet.size, now);
        link.transmitting = true;
        Some(Transmission {
            link: link_id,
            packet,
            tx_end,
            deliver_at,
        })
    }

    /// Marks the end of serialization; the caller should then try
    /// [`Topology::start_transmission`] again.
    pub fn finish_transmission(&mut self, link_id: LinkId) {
        self.links[link_id.0].transmitting = false;
    }

    /// Packets currently waiting in any egress queue.
    pub fn queued_packets(&self) -> impl Iterator<Item = &Packet> {
        self.links.iter().flat_map(|l| l.queue.iter())
    }
}

fn bfs_next_hops(node_count: usize, links: &[Link], src: NodeId) -> Vec<Option<LinkId>> {
    // first link on a shortest path from src to each node; lowest link id wins ties
    let mut first: Vec<Option<LinkId>> = vec![None; node_count];
    let mut seen = vec![false; node_count];
    seen[src.0] = true;
    let mut frontier = VecDeque::from([src]);
    while let Some(at) = frontier.pop_front() {
        for (i, l) in links.iter().enumerate() {
            if l.from != at || seen[l.to.0] {
                continue;
            }
            seen[l.to.0] = true;
            first[l.to.0] = if at == src { Some(LinkId(i)) } else { first[at.0] };
            frontier.push_back(l.to);
        }
    }
    first
}

/// Six-node dumbbell: N1 and N5 hang off N2, N4 and N6 off N3, and N2–N3 is
/// the shared bottleneck carrying `bottleneck_queue` in both directions.
pub fn build_dumbbell(
    link_bandwidth_bps: f64,
    prop_delay: Duration,
    bottleneck_queue: QueueDiscipline,
    edge_queue: QueueDiscipline,
) -> Result<Topology> {
    use NodeId as N;
    Topology::from_edges(
        6,
        &[
            (N::N1, N::N2, edge_queue),
            (N::N5, N::N2, edge_queue),
            (N::N2, N::N3, bottleneck_queue),
            (N::N3, N::N4, edge_queue),
            (N::N3, N::N6, edge_queue),
        ],
        link_bandwidth_bps,
        prop_delay,
    )
}
