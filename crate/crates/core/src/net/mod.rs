//! Topology, links, packet forwarding and egress queue disciplines.

mod packet;
mod queue;
mod topology;

pub use packet::{Addr, Packet, PacketKind, SackBlock};
pub use queue::{
    DropReason, PacketQueue, QueueDiscipline, QueueKind, QueueStats, RedParams, RedState, RedVerdict,
};
pub use topology::{
    build_dumbbell, ForwardOutcome, Link, LinkId, LinkStats, NodeId, Topology, Transmission,
};
