//! Link egress queues: DropTail and RED (non-gentle, packet mode).

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::SimTime;

use super::Packet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueueKind {
    DropTail,
    Red,
}

impl QueueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QueueKind::DropTail => "droptail",
            QueueKind::Red => "red",
        }
    }
}

impl fmt::Display for QueueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QueueKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "droptail" | "drop-tail" => Ok(QueueKind::DropTail),
            "red" => Ok(QueueKind::Red),
            other => Err(Error::invalid(format!(
                "unknown queue kind {other:?} (expected droptail or red)"
            ))),
        }
    }
}

/// RED thresholds are in packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedParams {
    pub min_th: f64,
    pub max_th: f64,
    pub max_p: f64,
    pub w_q: f64,
}

impl Default for RedParams {
    fn default() -> Self {
        RedParams {
            min_th: 5.0,
            max_th: 15.0,
            max_p: 0.02,
            w_q: 0.002,
        }
    }
}

impl RedParams {
    /// Early-drop probability for a given average and inter-drop count.
    ///
    /// `p_b` rises linearly from 0 at `min_th` to `max_p` at `max_th`;
    /// `p_a = p_b / (1 - count * p_b)` spreads drops out evenly, clamped to `[p_b, 1]`.
    pub fn drop_probability(&self, avg: f64, count: u64) -> f64 {
        let p_b = self.max_p * (avg - self.min_th) / (self.max_th - self.min_th);
        let denom = 1.0 - count as f64 * p_b;
        if denom <= 0.0 {
            1.0
        } else {
            (p_b / denom).clamp(p_b, 1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueueDiscipline {
    DropTail { limit: usize },
    Red { limit: usize, params: RedParams },
}

impl QueueDiscipline {
    pub fn drop_tail(limit: usize) -> Self {
        QueueDiscipline::DropTail { limit }
    }

    pub fn red(limit: usize, params: RedParams) -> Self {
        QueueDiscipline::Red { limit, params }
    }

    pub fn kind(&self) -> QueueKind {
        match self {
            QueueDiscipline::DropTail { .. } => QueueKind::DropTail,
            QueueDiscipline::Red { .. } => QueueKind::Red,
        }
    }

    pub fn limit(&self) -> usize {
        match *self {
            QueueDiscipline::DropTail { limit } | QueueDiscipline::Red { limit, .. } => limit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.limit() == 0 {
            return Err(Error::config("queue limit must be at least one packet"));
        }
        if let QueueDiscipline::Red { limit, params } = self {
            let RedParams { min_th, max_th, max_p, w_q } = *params;
            if !(min_th > 0.0 && min_th < max_th && max_th <= *limit as f64) {
                return Err(Error::config(format!(
                    "RED thresholds must satisfy 0 < min_th < max_th <= limit, got {min_th}, {max_th}, {limit}"
                )));
            }
            if !(max_p > 0.0 && max_p <= 1.0) {
                return Err(Error::config(format!("RED max_p must be in (0, 1], got {max_p}")));
            }
            if !(w_q > 0.0 && w_q < 1.0) {
                return Err(Error::config(format!("RED w_q must be in (0, 1), got {w_q}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RedVerdict {
    Admit,
    EarlyDrop,
    ForcedDrop,
}

/// Runtime RED state: the averaged queue length and the packets since the last drop.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RedState {
    pub avg: f64,
    pub count: u64,
    /// Set while the queue is empty and the link idle.
    pub idle_since: Option<SimTime>,
}

impl RedState {
    /// Folds the instantaneous occupancy into the EWMA. After an idle period
    /// the average decays as if `m` empty-queue samples had been taken, where
    /// `m` is the idle time over the one-packet transmission time.
    pub fn update_avg(
        &mut self,
        params: &RedParams,
        occupancy: usize,
        now: SimTime,
        typical_tx: Duration,
    ) -> f64 {
        match self.idle_since.take() {
            Some(since) if occupancy == 0 => {
                let m = (now - since).as_secs_f64() / typical_tx.as_secs_f64().max(f64::MIN_POSITIVE);
                self.avg *= (1.0 - params.w_q).powf(m);
            }
            _ => {
                self.avg = (1.0 - params.w_q) * self.avg + params.w_q * occupancy as f64;
            }
        }
        self.avg
    }

    /// Admission decision for one arrival given a uniform draw in `[0, 1)`.
    pub fn admit(&mut self, params: &RedParams, occupancy: usize, limit: usize, draw: f64) -> RedVerdict {
        if occupancy >= limit || self.avg >= params.max_th {
            self.count = 0;
            return RedVerdict::ForcedDrop;
        }
        if self.avg < params.min_th {
            self.count = 0;
            return RedVerdict::Admit;
        }
        if draw < params.drop_probability(self.avg, self.count) {
            self.count = 0;
            RedVerdict::EarlyDrop
        } else {
            self.count += 1;
            RedVerdict::Admit
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// DropTail overflow, or RED above `max_th` / at the hard limit.
    Overflow,
    /// RED probabilistic drop in the `[min_th, max_th)` band.
    Early,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueueStats {
    pub offered: u64,
    pub admitted: u64,
    pub early_drops: u64,
    pub forced_drops: u64,
    pub max_occupancy: usize,
}

/// FIFO of packets waiting for a link. The packet being serialized is not counted.
#[derive(Debug, Clone)]
pub struct PacketQueue {
    discipline: QueueDiscipline,
    buf: VecDeque<Packet>,
    red: RedState,
    typical_tx: Duration,
    stats: QueueStats,
}

impl PacketQueue {
    /// `typical_tx` is the transmission time of one packet, used for RED idle decay.
    pub fn new(discipline: QueueDiscipline, typical_tx: Duration) -> Self {
        PacketQueue {
            discipline,
            buf: VecDeque::with_capacity(discipline.limit()),
            red: RedState {
                idle_since: Some(SimTime::ZERO),
                ..RedState::default()
            },
            typical_tx,
            stats: QueueStats::default(),
        }
    }

    pub fn discipline(&self) -> &QueueDiscipline {
        &self.discipline
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn red_state(&self) -> &RedState {
        &self.red
    }

    pub fn stats(&self) -> QueueStats {
        self.stats
    }

    pub fn iter(&self) -> impl Iterator<Item = &Packet> {
        self.buf.iter()
    }

    pub fn offer<R: Rng + ?Sized>(
        &mut self,
        pkt: Packet,
        now: SimTime,
        rng: &mut R,
    ) -> std::result::Result<(), (Packet, DropReason)> {
        self.stats.offered += 1;
        let occupancy = self.buf.len();
        let verdict = match self.discipline {
            QueueDiscipline::DropTail { limit } => {
                if occupancy >= limit {
                    RedVerdict::ForcedDrop
                } else {
                    RedVerdict::Admit
                }
            }
            QueueDiscipline::Red { limit, params } => {
                self.red.update_avg(&params, occupancy, now, self.typical_tx);
                let draw: f64 = rng.gen();
                self.red.admit(&params, occupancy, limit, draw)
            }
        };
        match verdict {
            RedVerdict::Admit => {
                self.buf.push_back(pkt);
                self.stats.admitted += 1;
                self.stats.max_occupancy = self.stats.max_occupancy.max(self.buf.len());
                debug_assert!(self.buf.len() <= self.discipline.limit());
                Ok(())
            }
            RedVerdict::EarlyDrop => {
                self.stats.early_drops += 1;
                Err((pkt, DropReason::Early))
            }
            RedVerdict::ForcedDrop => {
                self.stats.forced_drops += 1;
                Err((pkt, DropReason::Overflow))
            }
        }
    }

    /// Head of line for transmission. An empty pop marks the start of an idle period.
    pub fn pop(&mut self, now: SimTime) -> Option<Packet> {
        let pkt = self.buf.pop_front();
        if pkt.is_none() && self.red.idle_since.is_none() {
            self.red.idle_since = Some(now);
        }
        pkt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Addr, NodeId, PacketKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pkt(uid: u64) -> Packet {
        Packet {
            uid,
            flow_id: 1,
            kind: PacketKind::Tcp,
            size: 1000,
            src: Addr::new(NodeId(0), 0),
            dst: Addr::new(NodeId(3), 0),
            seq: uid,
            created_at: SimTime::ZERO,
            sack: vec![],
        }
    }

    fn red() -> RedParams {
        RedParams::default()
    }

    #[test]
    fn ewma_single_step() {
        let mut s = RedState::default();
        let avg = s.update_avg(&red(), 10, SimTime::ZERO, Duration::from_micros(800));
        assert!((avg - 0.02).abs() < 1e-12);
    }

    #[test]
    fn ewma_unit_weight_tracks_occupancy() {
        let mut s = RedState { avg: 3.0, ..Default::default() };
        let p = RedParams { w_q: 1.0, ..red() };
        assert_eq!(s.update_avg(&p, 7, SimTime::ZERO, Duration::from_micros(800)), 7.0);
    }

    #[test]
    fn idle_period_decays_average() {
        let mut s = RedState {
            avg: 12.0,
            count: 0,
            idle_since: Some(SimTime::ZERO),
        };
        let now = SimTime::from_secs_f64(1.0).unwrap();
        let avg = s.update_avg(&red(), 0, now, Duration::from_micros(800));
        // 1250 idle packet times at w_q = 0.002
        let expected = 12.0 * 0.998f64.powf(1250.0);
        assert!((avg - expected).abs() < 1e-9);
        assert!(avg < 12.0 * 0.1);
        assert_eq!(s.idle_since, None);
    }

    #[test]
    fn below_min_always_admits() {
        let mut s = RedState { avg: 3.0, count: 4, idle_since: None };
        assert_eq!(s.admit(&red(), 3, 50, 0.0), RedVerdict::Admit);
        assert_eq!(s.count, 0);
    }

    #[test]
    fn above_max_forces_drop() {
        let mut s = RedState { avg: 16.0, count: 0, idle_since: None };
        assert_eq!(s.admit(&red(), 16, 50, 0.999), RedVerdict::ForcedDrop);
    }

    #[test]
    fn full_queue_forces_drop() {
        let mut s = RedState { avg: 6.0, count: 0, idle_since: None };
        assert_eq!(s.admit(&red(), 50, 50, 0.999), RedVerdict::ForcedDrop);
    }

    #[test]
    fn band_probability_at_midpoint() {
        assert!((red().drop_probability(10.0, 0) - 0.01).abs() < 1e-15);
        // count spreads drops: 0.01 / (1 - 50 * 0.01) = 0.02
        assert!((red().drop_probability(10.0, 50) - 0.02).abs() < 1e-15);
        assert_eq!(red().drop_probability(10.0, 100), 1.0);
        assert_eq!(red().drop_probability(10.0, 500), 1.0);
    }

    #[test]
    fn count_tracks_band_admissions() {
        let mut s = RedState { avg: 10.0, count: 0, idle_since: None };
        assert_eq!(s.admit(&red(), 10, 50, 0.5), RedVerdict::Admit);
        assert_eq!(s.admit(&red(), 10, 50, 0.5), RedVerdict::Admit);
        assert_eq!(s.count, 2);
        assert_eq!(s.admit(&red(), 10, 50, 0.0), RedVerdict::EarlyDrop);
        assert_eq!(s.count, 0);
    }

    #[test]
    fn droptail_drops_only_when_full() {
        let mut q = PacketQueue::new(QueueDiscipline::drop_tail(3), Duration::from_micros(800));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..3 {
            assert!(q.offer(pkt(i), SimTime::ZERO, &mut rng).is_ok());
        }
        let (p, why) = q.offer(pkt(3), SimTime::ZERO, &mut rng).unwrap_err();
        assert_eq!((p.uid, why), (3, DropReason::Overflow));
        assert_eq!(q.pop(SimTime::ZERO).unwrap().uid, 0);
        assert!(q.offer(pkt(4), SimTime::ZERO, &mut rng).is_ok());
        let order: Vec<u64> = q.iter().map(|p| p.uid).collect();
        assert_eq!(order, vec![1, 2, 4]);
    }

    #[test]
    fn validation() {
        assert!(QueueDiscipline::red(50, red()).validate().is_ok());
        assert!(QueueDiscipline::red(10, red()).validate().is_err());
        let bad = RedParams { min_th: 15.0, max_th: 5.0, ..red() };
        assert!(QueueDiscipline::red(50, bad).validate().is_err());
        let bad = RedParams { w_q: 1.0, ..red() };
        assert!(QueueDiscipline::red(50, bad).validate().is_err());
        let bad = RedParams { max_p: 0.0, ..red() };
        assert!(QueueDiscipline::red(50, bad).validate().is_err());
        assert!(QueueDiscipline::drop_tail(0).validate().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn occupancy_never_exceeds_limit(
                ops in proptest::collection::vec(any::<bool>(), 1..400),
                red_queue in any::<bool>(),
                seed in any::<u64>(),
            ) {
                let disc = if red_queue {
                    QueueDiscipline::red(20, RedParams { w_q: 0.2, ..RedParams::default() })
                } else {
                    QueueDiscipline::drop_tail(20)
                };
                let mut q = PacketQueue::new(disc, Duration::from_micros(800));
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut t = 0;
                let mut admitted = vec![];
                let mut popped = vec![];
                for (i, push) in ops.into_iter().enumerate() {
                    t += 100_000;
                    let now = SimTime::from_nanos(t);
                    if push {
                        if q.offer(pkt(i as u64), now, &mut rng).is_ok() {
                            admitted.push(i as u64);
                        }
                    } else if let Some(p) = q.pop(now) {
                        popped.push(p.uid);
                    }
                    prop_assert!(q.len() <= 20);
                    prop_assert!(q.red_state().avg >= 0.0);
                }
                // FIFO: departures are a prefix of admissions
                prop_assert_eq!(&admitted[..popped.len()], &popped[..]);
            }
        }
    }
}
