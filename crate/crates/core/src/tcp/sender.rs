//! TCP sender congestion control for Tahoe, Reno, NewReno, Vegas and SACK.
//!
//! The sender is a pure state machine: it consumes ACKs and timer expiries
//! and returns [`SenderAction`]s for the caller to carry out. Sequence
//! numbers count segments. An FTP source sits on top, so there is always
//! more data to send.

use std::collections::VecDeque;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::net::SackBlock;
use crate::sim::SimTime;

use super::rtt::{RttConfig, RttEstimator};
use super::sack::Scoreboard;
use super::vegas::{VegasParams, VegasState};
use super::TcpVariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcpConfig {
    pub segment_size: u32,
    pub ack_size: u32,
    /// Receiver window in segments; also caps cwnd growth.
    pub rcv_wnd: u32,
    pub initial_cwnd: f64,
    pub initial_ssthresh: f64,
    pub rtt: RttConfig,
    pub vegas: VegasParams,
}

impl Default for TcpConfig {
    fn default() -> Self {
        TcpConfig {
            segment_size: 1000,
            ack_size: 40,
            rcv_wnd: 20,
            initial_cwnd: 1.0,
            initial_ssthresh: 64.0,
            rtt: RttConfig::default(),
            vegas: VegasParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SenderAction {
    Send { seq: u64, retransmit: bool },
    /// (Re)start the retransmission timer with this timeout.
    ArmTimer(Duration),
    CancelTimer,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SenderStats {
    pub segments_sent: u64,
    pub retransmissions: u64,
    pub fast_retransmits: u64,
    pub timeouts: u64,
    /// Loss responses that recomputed ssthresh (fast retransmit or timeout).
    pub ssthresh_reductions: u64,
}

#[derive(Debug, Clone, Copy)]
struct SegmentMeta {
    sent_at: SimTime,
    retransmitted: bool,
}

#[derive(Debug, Clone)]
pub struct TcpSender {
    variant: TcpVariant,
    cfg: TcpConfig,
    cwnd: f64,
    ssthresh: f64,
    phase: Phase,
    dupacks: u32,
    snd_una: u64,
    /// Next segment to transmit; falls back to `snd_una` on go-back-N.
    snd_nxt: u64,
    /// One past the highest segment ever transmitted.
    snd_max: u64,
    /// `snd_max` when the last loss response started.
    recover: u64,
    rtt: RttEstimator,
    vegas: Option<VegasState>,
    scoreboard: Option<Scoreboard>,
    /// Metadata for `[snd_una, snd_max)`.
    sent: VecDeque<SegmentMeta>,
    timer_armed: bool,
    stats: SenderStats,
}

impl TcpSender {
    pub fn new(variant: TcpVariant, cfg: TcpConfig) -> Self {
        TcpSender {
            variant,
            cfg,
            cwnd: cfg.initial_cwnd.max(1.0),
            ssthresh: cfg.initial_ssthresh.max(2.0),
            phase: Phase::SlowStart,
            dupacks: 0,
            snd_una: 0,
            snd_nxt: 0,
            snd_max: 0,
            recover: 0,
            rtt: RttEstimator::new(cfg.rtt),
            vegas: (variant == TcpVariant::Vegas).then(|| VegasState::new(cfg.vegas)),
            scoreboard: variant.uses_sack().then(Scoreboard::default),
            sent: VecDeque::new(),
            timer_armed: false,
            stats: SenderStats::default(),
        }
    }

    pub fn variant(&self) -> TcpVariant {
        self.variant
    }

    pub fn config(&self) -> &TcpConfig {
        &self.cfg
    }

    pub fn cwnd(&self) -> f64 {
        self.cwnd
    }

    pub fn ssthresh(&self) -> f64 {
        self.ssthresh
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn dupacks(&self) -> u32 {
        self.dupacks
    }

    pub fn snd_una(&self) -> u64 {
        self.snd_una
    }

    pub fn snd_nxt(&self) -> u64 {
        self.snd_nxt
    }

    pub fn snd_max(&self) -> u64 {
        self.snd_max
    }

    pub fn recover(&self) -> u64 {
        self.recover
    }

    pub fn rtt(&self) -> &RttEstimator {
        &self.rtt
    }

    pub fn vegas(&self) -> Option<&VegasState> {
        self.vegas.as_ref()
    }

    pub fn scoreboard(&self) -> Option<&Scoreboard> {
        self.scoreboard.as_ref()
    }

    pub fn stats(&self) -> SenderStats {
        self.stats
    }

    /// Segments transmitted and not yet cumulatively acknowledged.
    pub fn flight_size(&self) -> u64 {
        self.snd_max - self.snd_una
    }

    /// Test hook: place the sender in an arbitrary congestion state.
    #[doc(hidden)]
    pub fn set_window(&mut self, cwnd: f64, ssthresh: f64, phase: Phase) {
        self.cwnd = cwnd;
        self.ssthresh = ssthresh;
        self.phase = phase;
    }

    /// New segments the window currently allows: `floor(min(cwnd, rcv_wnd)) - (snd_nxt - snd_una)`.
    pub fn usable_window(&self) -> u64 {
        let wnd = self.cwnd.min(self.cfg.rcv_wnd as f64).floor() as u64;
        wnd.saturating_sub(self.snd_nxt - self.snd_una)
    }

    /// Sends as many segments as the window allows.
    pub fn fill(&mut self, now: SimTime) -> Vec<SenderAction> {
        let mut out = Vec::new();
        self.fill_into(now, &mut out);
        out
    }

    fn fill_into(&mut self, now: SimTime, out: &mut Vec<SenderAction>) {
        for _ in 0..self.usable_window() {
            let seq = self.snd_nxt;
            self.transmit(seq, now, out);
        }
    }

    fn transmit(&mut self, seq: u64, now: SimTime, out: &mut Vec<SenderAction>) {
        debug_assert!(seq >= self.snd_una && seq <= self.snd_max);
        let retransmit = seq < self.snd_max;
        let meta = SegmentMeta {
            sent_at: now,
            retransmitted: retransmit,
        };
        if retransmit {
            self.sent[(seq - self.snd_una) as usize] = meta;
            self.stats.retransmissions += 1;
        } else {
            self.sent.push_back(meta);
        }
        if seq == self.snd_nxt {
            self.snd_nxt += 1;
        }
        self.snd_max = self.snd_max.max(self.snd_nxt);
        self.stats.segments_sent += 1;
        out.push(SenderAction::Send { seq, retransmit });
        if !self.timer_armed {
            self.timer_armed = true;
            out.push(SenderAction::ArmTimer(self.rtt.timeout()));
        }
    }

    fn restart_timer(&mut self, out: &mut Vec<SenderAction>) {
        if self.snd_max > self.snd_una {
            self.timer_armed = true;
            out.push(SenderAction::ArmTimer(self.rtt.timeout()));
        } else if self.timer_armed {
            self.timer_armed = false;
            out.push(SenderAction::CancelTimer);
        }
    }

    fn loss_ssthresh(&mut self) {
        self.ssthresh = ((self.flight_size() / 2).max(2)) as f64;
        self.stats.ssthresh_reductions += 1;
    }

    fn grow(&mut self, by: f64) {
        self.cwnd = (self.cwnd + by).min((self.cfg.rcv_wnd as f64).max(self.cwnd));
    }

    /// Processes a cumulative ACK (`ack` = next segment the receiver expects).
    pub fn on_ack(&mut self, ack: u64, sack: &[SackBlock], now: SimTime) -> Result<Vec<SenderAction>> {
        if ack > self.snd_max {
            return Err(Error::Protocol(format!(
                "ACK {ack} beyond highest transmitted segment {}",
                self.snd_max
            )));
        }
        if let Some(sb) = self.scoreboard.as_mut() {
            sb.update(ack.max(self.snd_una), sack);
        }
        let mut out = Vec::new();
        if ack > self.snd_una {
            self.on_new_ack(ack, now, &mut out)?;
        } else if ack == self.snd_una && self.snd_max > self.snd_una {
            self.on_dupack(now, &mut out);
        }
        Ok(out)
    }

    fn on_new_ack(&mut self, ack: u64, now: SimTime, out: &mut Vec<SenderAction>) -> Result<()> {
        let acked = ack - self.snd_una;
        let covered = self.sent.drain(..acked as usize);
        // Karn: only time ACKs whose covered segments were each sent once
        let mut last = None;
        let mut ambiguous = false;
        for m in covered {
            ambiguous |= m.retransmitted;
            last = Some(m.sent_at);
        }
        if let (false, Some(sent_at)) = (ambiguous, last) {
            let sample = (now - sent_at).as_secs_f64();
            if sample > 0.0 {
                self.rtt.update(sample)?;
                if let Some(v) = self.vegas.as_mut() {
                    v.observe(sample);
                }
            }
        }
        self.snd_una = ack;
        self.snd_nxt = self.snd_nxt.max(ack);
        self.dupacks = 0;

        if self.phase == Phase::FastRecovery {
            self.on_recovery_ack(ack, acked, now, out);
        } else if self.vegas.is_some() {
            self.vegas_on_ack(ack)?;
        } else if self.cwnd < self.ssthresh {
            self.grow(1.0);
            if self.cwnd >= self.ssthresh {
                self.phase = Phase::CongestionAvoidance;
            }
        } else {
            self.grow(1.0 / self.cwnd);
            self.phase = Phase::CongestionAvoidance;
        }

        self.restart_timer(out);
        if self.phase == Phase::FastRecovery && self.scoreboard.is_some() {
            self.sack_send(now, out);
        } else {
            self.fill_into(now, out);
        }
        Ok(())
    }

    fn exit_recovery(&mut self) {
        self.cwnd = self.ssthresh;
        self.phase = Phase::CongestionAvoidance;
        if let Some(sb) = self.scoreboard.as_mut() {
            sb.clear_retransmitted();
        }
    }

    fn on_recovery_ack(&mut self, ack: u64, acked: u64, now: SimTime, out: &mut Vec<SenderAction>) {
        match self.variant {
            TcpVariant::Reno | TcpVariant::Vegas | TcpVariant::Tahoe => self.exit_recovery(),
            TcpVariant::NewReno => {
                if ack >= self.recover {
                    self.exit_recovery();
                } else {
                    // partial ACK: the next hole is lost too
                    self.transmit(ack, now, out);
                    self.cwnd = (self.cwnd - acked as f64 + 1.0).max(1.0);
                }
            }
            TcpVariant::Sack => {
                if ack >= self.recover {
                    self.exit_recovery();
                }
            }
        }
        if self.phase != Phase::FastRecovery {
            if let Some(v) = self.vegas.as_mut() {
                v.epoch_end = self.snd_max;
                v.epoch_min_rtt = None;
            }
        }
    }

    fn vegas_on_ack(&mut self, ack: u64) -> Result<()> {
        let v = self.vegas.as_mut().expect("vegas sender");
        if self.phase == Phase::SlowStart && v.grow_this_rtt {
            self.cwnd = (self.cwnd + 1.0).min((self.cfg.rcv_wnd as f64).max(self.cwnd));
            if self.cwnd >= self.ssthresh {
                self.phase = Phase::CongestionAvoidance;
            }
        }
        if ack >= v.epoch_end {
            if let Some(sample) = v.epoch_min_rtt.take() {
                let (cwnd, phase) = v.adjust(self.cwnd, self.phase, sample)?;
                self.cwnd = cwnd.min((self.cfg.rcv_wnd as f64).max(self.cwnd)).max(1.0);
                if phase == Phase::CongestionAvoidance && self.phase == Phase::SlowStart {
                    self.ssthresh = self.ssthresh.min(self.cwnd).max(2.0);
                }
                self.phase = phase;
            }
            v.grow_this_rtt = !v.grow_this_rtt;
            v.epoch_end = self.snd_max.max(ack + 1);
        }
        Ok(())
    }

    fn on_dupack(&mut self, now: SimTime, out: &mut Vec<SenderAction>) {
        self.dupacks += 1;
        if self.phase == Phase::FastRecovery {
            if self.scoreboard.is_some() {
                self.sack_send(now, out);
            } else {
                self.cwnd += 1.0;
                self.fill_into(now, out);
            }
            return;
        }
        if self.dupacks != 3 {
            return;
        }
        let guarded = matches!(self.variant, TcpVariant::NewReno | TcpVariant::Sack | TcpVariant::Tahoe);
        if guarded && self.snd_una < self.recover {
            // duplicates of data sent before the last loss response
            return;
        }
        self.loss_ssthresh();
        self.stats.fast_retransmits += 1;
        self.recover = self.snd_max;
        let una = self.snd_una;
        match self.variant {
            TcpVariant::Tahoe => {
                self.cwnd = 1.0;
                self.phase = Phase::SlowStart;
                self.snd_nxt = una;
                self.transmit(una, now, out);
            }
            TcpVariant::Reno | TcpVariant::NewReno | TcpVariant::Vegas => {
                self.cwnd = self.ssthresh + 3.0;
                self.phase = Phase::FastRecovery;
                self.transmit(una, now, out);
                self.fill_into(now, out);
            }
            TcpVariant::Sack => {
                self.cwnd = self.ssthresh;
                self.phase = Phase::FastRecovery;
                let sb = self.scoreboard.as_mut().expect("sack sender");
                sb.clear_retransmitted();
                sb.mark_retransmitted(una);
                self.transmit(una, now, out);
                self.sack_send(now, out);
            }
        }
    }

    /// Recovery transmissions driven by the pipe estimate: oldest hole first,
    /// then new data, while `pipe < cwnd`.
    fn sack_send(&mut self, now: SimTime, out: &mut Vec<SenderAction>) {
        loop {
            let sb = self.scoreboard.as_ref().expect("sack sender");
            if sb.pipe(self.snd_una, self.snd_max) >= self.cwnd.floor() as u64 {
                break;
            }
            if let Some(hole) = sb.next_hole(self.snd_una) {
                self.scoreboard.as_mut().expect("sack sender").mark_retransmitted(hole);
                self.transmit(hole, now, out);
                continue;
            }
            while self.snd_nxt < self.snd_max && sb.is_sacked(self.snd_nxt) {
                self.snd_nxt += 1;
            }
            if self.snd_nxt - self.snd_una >= self.cfg.rcv_wnd as u64 {
                break;
            }
            let seq = self.snd_nxt;
            self.transmit(seq, now, out);
        }
    }

    /// Retransmission timer expiry: multiplicative backoff, window to one
    /// segment, resend from `snd_una` (go-back-N).
    pub fn on_timeout(&mut self, now: SimTime) -> Vec<SenderAction> {
        let mut out = Vec::new();
        self.timer_armed = false;
        if self.snd_max == self.snd_una {
            return out;
        }
        self.loss_ssthresh();
        self.stats.timeouts += 1;
        self.cwnd = 1.0;
        self.phase = Phase::SlowStart;
        self.dupacks = 0;
        self.recover = self.snd_max;
        self.rtt.back_off();
        if let Some(sb) = self.scoreboard.as_mut() {
            sb.clear();
        }
        if let Some(v) = self.vegas.as_mut() {
            v.grow_this_rtt = true;
            v.epoch_end = self.snd_max;
            v.epoch_min_rtt = None;
        }
        self.snd_nxt = self.snd_una;
        let una = self.snd_una;
        self.transmit(una, now, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(ms: u64) -> SimTime {
        SimTime::from_nanos(ms * 1_000_000)
    }

    fn sends(actions: &[SenderAction]) -> Vec<(u64, bool)> {
        actions
            .iter()
            .filter_map(|a| match a {
                SenderAction::Send { seq, retransmit } => Some((*seq, *retransmit)),
                _ => None,
            })
            .collect()
    }

    /// Sender with `n` segments outstanding and the given window.
    fn loaded(variant: TcpVariant, cwnd: f64, n: u64) -> TcpSender {
        let mut s = TcpSender::new(
            variant,
            TcpConfig {
                rcv_wnd: 64,
                initial_cwnd: n as f64,
                ..TcpConfig::default()
            },
        );
        let out = s.fill(t(0));
        assert_eq!(sends(&out).len() as u64, n);
        s.set_window(cwnd, 64.0, Phase::CongestionAvoidance);
        s
    }

    #[test]
    fn fill_uses_floor_of_window() {
        let mut s = TcpSender::new(TcpVariant::Reno, TcpConfig::default());
        assert_eq!(sends(&s.fill(t(0))), vec![(0, false)]);

        let mut s = loaded(TcpVariant::Reno, 8.0, 8);
        assert!(sends(&s.fill(t(1))).is_empty());

        let mut s = loaded(TcpVariant::Reno, 5.7, 3);
        assert_eq!(sends(&s.fill(t(1))), vec![(3, false), (4, false)]);
    }

    #[test]
    fn first_send_arms_timer() {
        let mut s = TcpSender::new(TcpVariant::Reno, TcpConfig::default());
        let out = s.fill(t(0));
        assert!(out.contains(&SenderAction::ArmTimer(Duration::from_secs(1))));
    }

    #[test]
    fn slow_start_and_avoidance_growth() {
        let mut s = loaded(TcpVariant::Reno, 2.0, 2);
        s.set_window(2.0, 64.0, Phase::SlowStart);
        s.on_ack(1, &[], t(10)).unwrap();
        assert_eq!(s.cwnd(), 3.0);
        assert_eq!(s.phase(), Phase::SlowStart);

        let mut s = loaded(TcpVariant::Reno, 4.0, 4);
        s.set_window(4.0, 2.0, Phase::CongestionAvoidance);
        s.on_ack(1, &[], t(10)).unwrap();
        assert_eq!(s.cwnd(), 4.25);

        let mut s = loaded(TcpVariant::Reno, 8.0, 8);
        s.set_window(8.0, 8.0, Phase::SlowStart);
        s.on_ack(1, &[], t(10)).unwrap();
        assert_eq!(s.phase(), Phase::CongestionAvoidance);
    }

    #[test]
    fn ack_beyond_sent_is_protocol_error() {
        let mut s = loaded(TcpVariant::Reno, 4.0, 4);
        assert!(matches!(s.on_ack(9, &[], t(5)), Err(Error::Protocol(_))));
    }

    #[test]
    fn reno_fast_retransmit() {
        let mut s = loaded(TcpVariant::Reno, 8.0, 8);
        s.on_ack(0, &[], t(5)).unwrap();
        s.on_ack(0, &[], t(6)).unwrap();
        let out = s.on_ack(0, &[], t(7)).unwrap();
        assert_eq!(s.ssthresh(), 4.0);
        assert_eq!(s.cwnd(), 7.0);
        assert_eq!(s.phase(), Phase::FastRecovery);
        assert_eq!(sends(&out), vec![(0, true)]);
        // inflation
        s.on_ack(0, &[], t(8)).unwrap();
        assert_eq!(s.cwnd(), 8.0);
    }

    #[test]
    fn tahoe_fast_retransmit_resets_window() {
        let mut s = loaded(TcpVariant::Tahoe, 8.0, 8);
        for i in 0..3 {
            s.on_ack(0, &[], t(5 + i)).unwrap();
        }
        assert_eq!(s.ssthresh(), 4.0);
        assert_eq!(s.cwnd(), 1.0);
        assert_eq!(s.phase(), Phase::SlowStart);
        assert_eq!(s.stats().fast_retransmits, 1);
        assert_eq!(s.snd_nxt(), 1);
        // further duplicates neither inflate nor retransmit
        let out = s.on_ack(0, &[], t(9)).unwrap();
        assert!(sends(&out).is_empty());
        assert_eq!(s.cwnd(), 1.0);
    }

    #[test]
    fn partial_ack_newreno_stays_reno_exits() {
        for (variant, stays) in [(TcpVariant::NewReno, true), (TcpVariant::Reno, false)] {
            let mut s = loaded(variant, 8.0, 8);
            for i in 0..3 {
                s.on_ack(0, &[], t(5 + i)).unwrap();
            }
            assert_eq!(s.phase(), Phase::FastRecovery);
            let out = s.on_ack(2, &[], t(20)).unwrap();
            if stays {
                assert_eq!(s.phase(), Phase::FastRecovery);
                assert_eq!(sends(&out)[0], (2, true));
                // 7 - 2 acked + 1
                assert_eq!(s.cwnd(), 6.0);
                s.on_ack(8, &[], t(30)).unwrap();
                assert_eq!(s.phase(), Phase::CongestionAvoidance);
                assert_eq!(s.cwnd(), 4.0);
            } else {
                assert_eq!(s.phase(), Phase::CongestionAvoidance);
                assert_eq!(s.cwnd(), 4.0);
            }
        }
    }

    #[test]
    fn timeout_halves_and_backs_off() {
        let mut s = loaded(TcpVariant::Reno, 10.0, 10);
        let out = s.on_timeout(t(1000));
        assert_eq!(s.ssthresh(), 5.0);
        assert_eq!(s.cwnd(), 1.0);
        assert_eq!(s.phase(), Phase::SlowStart);
        assert_eq!(sends(&out), vec![(0, true)]);
        assert!(out.contains(&SenderAction::ArmTimer(Duration::from_secs(2))));
        s.on_timeout(t(3000));
        assert_eq!(s.rtt().timeout(), Duration::from_secs(4));

        let mut s = loaded(TcpVariant::NewReno, 1.0, 1);
        s.on_timeout(t(1000));
        assert_eq!(s.ssthresh(), 2.0);
    }

    #[test]
    fn karn_skips_retransmitted_samples() {
        let mut s = loaded(TcpVariant::Reno, 4.0, 4);
        s.on_timeout(t(1000));
        s.on_ack(1, &[], t(1100)).unwrap();
        assert_eq!(s.rtt().srtt(), None);
        // segment 1 was only sent once (go-back-N has not resent it yet)
        let mut s = loaded(TcpVariant::Reno, 4.0, 4);
        s.on_ack(1, &[], t(100)).unwrap();
        assert_eq!(s.rtt().srtt(), Some(0.1));
    }

    #[test]
    fn timer_cancelled_when_all_acked() {
        let mut s = loaded(TcpVariant::Reno, 2.0, 2);
        s.set_window(2.0, 2.0, Phase::CongestionAvoidance);
        let out = s.on_ack(2, &[], t(50)).unwrap();
        // window opens again, so new data re-arms instead of cancelling
        assert!(out.iter().any(|a| matches!(a, SenderAction::ArmTimer(_))));
        assert_eq!(s.dupacks(), 0);
    }

    #[test]
    fn sack_recovery_fills_holes_first() {
        let mut s = loaded(TcpVariant::Sack, 10.0, 10);
        // 0 and 2 lost; 1, 3, 4 arrived
        s.on_ack(0, &[(1, 2)], t(5)).unwrap();
        s.on_ack(0, &[(3, 4), (1, 2)], t(6)).unwrap();
        let out = s.on_ack(0, &[(3, 5), (1, 2)], t(7)).unwrap();
        assert_eq!(s.phase(), Phase::FastRecovery);
        assert_eq!(s.ssthresh(), 5.0);
        assert_eq!(s.cwnd(), 5.0);
        // pipe: 0 retransmitted (1) + 5..10 in flight (5) = 6 >= 5, only the first hole goes out
        assert_eq!(sends(&out), vec![(0, true)]);
        // 5 arrives: pipe 5, still full
        let out = s.on_ack(0, &[(3, 6), (1, 2)], t(8)).unwrap();
        assert!(sends(&out).is_empty());
        // 6 arrives: pipe 4, next hole is 2
        let out = s.on_ack(0, &[(3, 7), (1, 2)], t(9)).unwrap();
        assert_eq!(sends(&out), vec![(2, true)]);
        // partial ack keeps recovery going
        s.on_ack(2, &[(3, 5)], t(20)).unwrap();
        assert_eq!(s.phase(), Phase::FastRecovery);
        s.on_ack(10, &[], t(30)).unwrap();
        assert_eq!(s.phase(), Phase::CongestionAvoidance);
        assert_eq!(s.cwnd(), 5.0);
    }

    #[test]
    fn newreno_ignores_dupacks_from_before_timeout() {
        let mut s = loaded(TcpVariant::NewReno, 8.0, 8);
        s.on_timeout(t(1000));
        s.on_ack(3, &[], t(1050)).unwrap();
        for i in 0..3 {
            s.on_ack(3, &[], t(1060 + i)).unwrap();
        }
        assert_eq!(s.stats().fast_retransmits, 0);
        assert_ne!(s.phase(), Phase::FastRecovery);
    }

    #[test]
    fn vegas_holds_window_in_slow_start_every_other_rtt() {
        let mut s = TcpSender::new(TcpVariant::Vegas, TcpConfig::default());
        s.fill(t(0));
        // rtt 1: grow
        s.on_ack(1, &[], t(100)).unwrap();
        assert_eq!(s.cwnd(), 2.0);
        s.fill(t(100));
        // epoch ended on ack 1, next RTT does not grow
        s.on_ack(2, &[], t(200)).unwrap();
        assert_eq!(s.cwnd(), 2.0);
        assert_eq!(s.vegas().unwrap().base_rtt(), Some(0.1));
    }
}
