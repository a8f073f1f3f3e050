use std::collections::BTreeSet;

use crate::net::SackBlock;

/// Sender-side record of selectively acknowledged segments above `snd_una`
/// and of holes already retransmitted during the current recovery.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scoreboard {
    sacked: BTreeSet<u64>,
    rexmitted: BTreeSet<u64>,
}

impl Scoreboard {
    pub fn update(&mut self, snd_una: u64, blocks: &[SackBlock]) {
        self.sacked = self.sacked.split_off(&snd_una);
        self.rexmitted = self.rexmitted.split_off(&snd_una);
        for &(start, end) in blocks {
            self.sacked.extend(start.max(snd_una)..end);
        }
    }

    pub fn is_sacked(&self, seq: u64) -> bool {
        self.sacked.contains(&seq)
    }

    pub fn highest_sacked(&self) -> Option<u64> {
        self.sacked.last().copied()
    }

    pub fn sacked_count(&self) -> usize {
        self.sacked.len()
    }

    /// An unacknowledged segment below the highest SACKed one is presumed lost.
    pub fn is_lost(&self, seq: u64) -> bool {
        !self.is_sacked(seq) && self.highest_sacked().is_some_and(|h| seq < h)
    }

    /// Oldest presumed-lost segment not yet retransmitted in this recovery.
    pub fn next_hole(&self, snd_una: u64) -> Option<u64> {
        let high = self.highest_sacked()?;
        (snd_una..high).find(|s| !self.is_sacked(*s) && !self.rexmitted.contains(s))
    }

    pub fn mark_retransmitted(&mut self, seq: u64) {
        self.rexmitted.insert(seq);
    }

    pub fn clear_retransmitted(&mut self) {
        self.rexmitted.clear();
    }

    pub fn clear(&mut self) {
        self.sacked.clear();
        self.rexmitted.clear();
    }

    /// Estimate of segments still in the network among `[snd_una, snd_max)`:
    /// every unSACKed segment not presumed lost, plus every retransmission.
    pub fn pipe(&self, snd_una: u64, snd_max: u64) -> u64 {
        (snd_una..snd_max)
            .filter(|s| !self.is_sacked(*s))
            .map(|s| u64::from(!self.is_lost(s)) + u64::from(self.rexmitted.contains(&s)))
            .sum()
    }
}
