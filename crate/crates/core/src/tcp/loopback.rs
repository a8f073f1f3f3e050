//! A sender and receiver wired back to back over a lossless pipe with
//! scripted drops. Useful for exercising loss recovery in isolation from
//! queueing.

use std::collections::BTreeSet;
use std::time::Duration;

use crate::error::Result;
use crate::sim::{EventHandle, Scheduler, SimTime};

use super::{AckInfo, Phase, SenderAction, TcpConfig, TcpReceiver, TcpSender, TcpVariant};

#[derive(Debug, Clone)]
pub struct LoopbackConfig {
    pub one_way_delay: Duration,
    /// Serialization time of one data segment at the sender.
    pub segment_tx: Duration,
    pub duration: Duration,
    /// Segments whose first transmission is lost.
    pub drop_first_tx: BTreeSet<u64>,
}

impl Default for LoopbackConfig {
    fn default() -> Self {
        LoopbackConfig {
            one_way_delay: Duration::from_millis(10),
            segment_tx: Duration::from_micros(800),
            duration: Duration::from_secs(1),
            drop_first_tx: BTreeSet::new(),
        }
    }
}

/// Sender state right after it processed one ACK.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AckObservation {
    pub at: SimTime,
    pub ack: u64,
    pub phase: Phase,
    pub cwnd: f64,
    pub ssthresh: f64,
}

#[derive(Debug, Clone)]
pub struct LoopbackReport {
    pub sender: TcpSender,
    pub acks: Vec<AckObservation>,
    /// ssthresh value after each loss response, in order.
    pub ssthresh_history: Vec<f64>,
    /// Segment numbers in the order the application received them.
    pub delivered: Vec<u64>,
    pub dropped: Vec<u64>,
}

enum Ev {
    Data(u64),
    Ack(AckInfo),
    Timeout,
}

pub fn run_loopback(variant: TcpVariant, tcp: TcpConfig, cfg: &LoopbackConfig) -> Result<LoopbackReport> {
    let mut sched: Scheduler<Ev> = Scheduler::new();
    let mut sender = TcpSender::new(variant, tcp);
    let mut receiver = TcpReceiver::new(variant.uses_sack());
    let mut timer: Option<EventHandle> = None;
    let mut link_free = SimTime::ZERO;
    let mut first_tx_done: BTreeSet<u64> = BTreeSet::new();
    let mut report = LoopbackReport {
        sender: sender.clone(),
        acks: Vec::new(),
        ssthresh_history: Vec::new(),
        delivered: Vec::new(),
        dropped: Vec::new(),
    };

    let mut apply = |sched: &mut Scheduler<Ev>,
                     sender: &TcpSender,
                     actions: Vec<SenderAction>,
                     timer: &mut Option<EventHandle>,
                     report: &mut LoopbackReport| {
        let now = sched.now();
        for a in actions {
            match a {
                SenderAction::Send { seq, .. } => {
                    let start = now.max(link_free);
                    link_free = start + cfg.segment_tx;
                    if first_tx_done.insert(seq) && cfg.drop_first_tx.contains(&seq) {
                        report.dropped.push(seq);
                        continue;
                    }
                    let at = link_free + cfg.one_way_delay;
                    sched.schedule_at(at, Ev::Data(seq)).expect("future");
                }
                SenderAction::ArmTimer(after) => {
                    if let Some(h) = timer.take() {
                        sched.cancel(h);
                    }
                    *timer = Some(sched.schedule(after, Ev::Timeout));
                }
                SenderAction::CancelTimer => {
                    if let Some(h) = timer.take() {
                        sched.cancel(h);
                    }
                }
            }
        }
        if sender.stats().ssthresh_reductions as usize > report.ssthresh_history.len() {
            report.ssthresh_history.push(sender.ssthresh());
        }
    };

    let first = sender.fill(SimTime::ZERO);
    apply(&mut sched, &sender, first, &mut timer, &mut report);

    let end = SimTime::ZERO + cfg.duration;
    sched.run_until(end, |sched, ev| {
        let now = sched.now();
        match ev {
            Ev::Data(seq) => {
                let info = receiver.on_data(seq);
                report.delivered.extend(info.delivered.clone());
                sched.schedule(cfg.one_way_delay, Ev::Ack(info));
            }
            Ev::Ack(info) => {
                let actions = sender.on_ack(info.ack, &info.sack, now)?;
                report.acks.push(AckObservation {
                    at: now,
                    ack: info.ack,
                    phase: sender.phase(),
                    cwnd: sender.cwnd(),
                    ssthresh: sender.ssthresh(),
                });
                apply(sched, &sender, actions, &mut timer, &mut report);
            }
            Ev::Timeout => {
                timer = None;
                let actions = sender.on_timeout(now);
                apply(sched, &sender, actions, &mut timer, &mut report);
            }
        }
        Ok(())
    })?;
    report.sender = sender;
    Ok(report)
}
