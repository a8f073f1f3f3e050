use std::collections::{BTreeSet, VecDeque};
use std::ops::Range;

use crate::net::SackBlock;

const MAX_SACK_BLOCKS: usize = 3;

/// What the receiver sends back for one arriving segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AckInfo {
    /// Next expected segment.
    pub ack: u64,
    /// Most recent first, at most three.
    pub sack: Vec<SackBlock>,
    /// Segments handed to the application by this arrival, in order.
    pub delivered: Range<u64>,
}

/// Cumulative-ACK receiver with an out-of-order buffer; one immediate ACK per segment.
#[derive(Debug, Clone, Default)]
pub struct TcpReceiver {
    rcv_nxt: u64,
    out_of_order: BTreeSet<u64>,
    /// Out-of-order arrivals, most recent first, used to order SACK blocks.
    recent: VecDeque<u64>,
    sack_enabled: bool,
}

impl TcpReceiver {
    pub fn new(sack_enabled: bool) -> Self {
        TcpReceiver {
            sack_enabled,
            ..Default::default()
        }
    }

    pub fn rcv_nxt(&self) -> u64 {
        self.rcv_nxt
    }

    pub fn buffered(&self) -> impl Iterator<Item = u64> + '_ {
        self.out_of_order.iter().copied()
    }

    pub fn on_data(&mut self, seq: u64) -> AckInfo {
        let before = self.rcv_nxt;
        if seq == self.rcv_nxt {
            self.rcv_nxt += 1;
            while self.out_of_order.remove(&self.rcv_nxt) {
                self.rcv_nxt += 1;
            }
        } else if seq > self.rcv_nxt && self.out_of_order.insert(seq) {
            self.recent.push_front(seq);
        }
        let rcv_nxt = self.rcv_nxt;
        self.recent.retain(|s| *s >= rcv_nxt);
        AckInfo {
            ack: self.rcv_nxt,
            sack: if self.sack_enabled { self.sack_blocks() } else { Vec::new() },
            delivered: before..self.rcv_nxt,
        }
    }

    fn block_around(&self, seq: u64) -> SackBlock {
        let mut start = seq;
        while start > self.rcv_nxt && self.out_of_order.contains(&(start - 1)) {
            start -= 1;
        }
        let mut end = seq + 1;
        while self.out_of_order.contains(&end) {
            end += 1;
        }
        (start, end)
    }

    pub fn sack_blocks(&self) -> Vec<SackBlock> {
        let mut blocks: Vec<SackBlock> = Vec::with_capacity(MAX_SACK_BLOCKS);
        for &seq in &self.recent {
            let b = self.block_around(seq);
            if !blocks.contains(&b) {
                blocks.push(b);
                if blocks.len() == MAX_SACK_BLOCKS {
                    break;
                }
            }
        }
        blocks
    }
}
