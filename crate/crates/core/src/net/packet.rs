use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sim::SimTime;

use super::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketKind {
    Tcp,
    Ack,
    Cbr,
}

impl PacketKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PacketKind::Tcp => "tcp",
            PacketKind::Ack => "ack",
            PacketKind::Cbr => "cbr",
        }
    }

    /// Payload-carrying packets, i.e. everything except ACKs.
    pub fn is_data(self) -> bool {
        !matches!(self, PacketKind::Ack)
    }
}

impl fmt::Display for PacketKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PacketKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tcp" => Ok(PacketKind::Tcp),
            "ack" => Ok(PacketKind::Ack),
            "cbr" => Ok(PacketKind::Cbr),
            other => Err(Error::invalid(format!("unknown packet type {other:?}"))),
        }
    }
}

/// Agent address rendered as `node.port`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Addr {
    pub node: u32,
    pub port: u32,
}

impl Addr {
    pub fn new(node: NodeId, port: u32) -> Self {
        Addr {
            node: node.index() as u32,
            port,
        }
    }

    pub fn node_id(self) -> NodeId {
        NodeId(self.node as usize)
    }
}

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.port)
    }
}

impl FromStr for Addr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (node, port) = s
            .split_once('.')
            .ok_or_else(|| Error::invalid(format!("address {s:?} is not node.port")))?;
        let parse = |v: &str| {
            v.parse::<u32>()
                .map_err(|_| Error::invalid(format!("address {s:?} is not node.port")))
        };
        Ok(Addr {
            node: parse(node)?,
            port: parse(port)?,
        })
    }
}

/// Selective acknowledgment block `[start, end)` in segment numbers.
pub type SackBlock = (u64, u64);

#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub uid: u64,
    pub flow_id: u32,
    pub kind: PacketKind,
    pub size: u32,
    pub src: Addr,
    pub dst: Addr,
    /// Segment number for data, cumulative ACK (next expected segment) for ACKs.
    pub seq: u64,
    pub created_at: SimTime,
    pub sack: Vec<SackBlock>,
}
