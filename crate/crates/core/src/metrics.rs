//! Per-flow throughput, drop rate and latency computed from trace records,
//! plus two-flow fairness.
//!
//! Conventions, for a data flow `f` (ACKs are never counted):
//! - a packet is *sent* when it is enqueued at its source node (`+` with
//!   `from_node == src.node`); every retransmission is a new packet;
//! - it is *received* on `r` at its destination node (`to_node == dst.node`);
//! - latency is receive time minus source enqueue time, per packet id.
//!
//! Everything is available both as functions over record slices and as
//! streaming [`TraceSink`]s, so a live run and a parsed trace file go
//! through the same code.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sim::SimTime;
use crate::trace::{TraceEvent, TraceRecord, TraceSink};

/// Half-open measurement window `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub start: SimTime,
    pub end: SimTime,
}

impl Interval {
    pub fn new(start: SimTime, end: SimTime) -> Result<Self> {
        if end <= start {
            return Err(Error::invalid(format!("empty measurement interval [{start}, {end})")));
        }
        Ok(Interval { start, end })
    }

    pub fn from_secs(start: f64, end: f64) -> Result<Self> {
        Interval::new(SimTime::from_secs_f64(start)?, SimTime::from_secs_f64(end)?)
    }

    pub fn contains(&self, t: SimTime) -> bool {
        self.start <= t && t < self.end
    }

    pub fn len_secs(&self) -> f64 {
        (self.end - self.start).as_secs_f64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropRate {
    pub fraction: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowStats {
    pub flow_id: u32,
    pub sent_packets: u64,
    pub received_packets: u64,
    pub dropped_packets: u64,
    pub received_bytes: u64,
    pub throughput_mbps: f64,
    /// `None` when nothing was delivered in the interval.
    pub avg_latency: Option<f64>,
    pub drop_rate: f64,
    pub interval: Interval,
}

fn bits_to_mbps(bytes: u64, secs: f64) -> f64 {
    bytes as f64 * 8.0 / secs / 1e6
}

/// Tracks source enqueue times so receptions can be turned into latencies.
#[derive(Debug, Default, Clone)]
struct LatencyTracker {
    enqueued_at: HashMap<u64, SimTime>,
}

enum FlowEvent {
    Sent,
    Dropped,
    Received { bytes: u32, latency: Option<f64> },
}

impl LatencyTracker {
    fn classify(&mut self, flow_id: u32, r: &TraceRecord) -> Option<FlowEvent> {
        if r.fid != flow_id || !r.pkt_type.is_data() {
            return None;
        }
        match r.event {
            TraceEvent::Enqueue if r.from_node == r.src.node => {
                self.enqueued_at.entry(r.pkt_id).or_insert(r.time);
                Some(FlowEvent::Sent)
            }
            TraceEvent::Drop => {
                self.enqueued_at.remove(&r.pkt_id);
                Some(FlowEvent::Dropped)
            }
            TraceEvent::Receive if r.to_node == r.dst.node => {
                let latency = self
                    .enqueued_at
                    .remove(&r.pkt_id)
                    .map(|t0| (r.time - t0).as_secs_f64());
                Some(FlowEvent::Received {
                    bytes: r.pkt_size,
                    latency,
                })
            }
            _ => None,
        }
    }
}

/// Raw per-flow tallies for one interval. The simulator keeps these live
/// and [`FlowStatsBuilder`] rebuilds them from trace records.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlowCounts {
    pub sent: u64,
    pub received: u64,
    pub dropped: u64,
    pub received_bytes: u64,
    pub latency_sum: f64,
    pub latency_samples: u64,
}

impl FlowCounts {
    pub fn record_received(&mut self, bytes: u32, latency: Option<f64>) {
        self.received += 1;
        self.received_bytes += bytes as u64;
        if let Some(l) = latency {
            self.latency_sum += l;
            self.latency_samples += 1;
        }
    }

    pub fn stats(&self, flow_id: u32, interval: Interval) -> FlowStats {
        FlowStats {
            flow_id,
            sent_packets: self.sent,
            received_packets: self.received,
            dropped_packets: self.dropped,
            received_bytes: self.received_bytes,
            throughput_mbps: bits_to_mbps(self.received_bytes, interval.len_secs()),
            avg_latency: (self.latency_samples > 0).then(|| self.latency_sum / self.latency_samples as f64),
            // drops near the window start may belong to sends before it
            drop_rate: if self.sent > 0 {
                (self.dropped as f64 / self.sent as f64).min(1.0)
            } else {
                0.0
            },
            interval,
        }
    }
}

/// Streaming accumulator for one flow over one interval.
#[derive(Debug, Clone)]
pub struct FlowStatsBuilder {
    flow_id: u32,
    interval: Interval,
    tracker: LatencyTracker,
    counts: FlowCounts,
}

impl FlowStatsBuilder {
    pub fn new(flow_id: u32, interval: Interval) -> Self {
        FlowStatsBuilder {
            flow_id,
            interval,
            tracker: LatencyTracker::default(),
            counts: FlowCounts::default(),
        }
    }

    pub fn observe(&mut self, r: &TraceRecord) {
        let Some(ev) = self.tracker.classify(self.flow_id, r) else {
            return;
        };
        if !self.interval.contains(r.time) {
            return;
        }
        match ev {
            FlowEvent::Sent => self.counts.sent += 1,
            FlowEvent::Dropped => self.counts.dropped += 1,
            FlowEvent::Received { bytes, latency } => self.counts.record_received(bytes, latency),
        }
    }

    pub fn counts(&self) -> &FlowCounts {
        &self.counts
    }

    pub fn finish(&self) -> FlowStats {
        self.counts.stats(self.flow_id, self.interval)
    }
}

impl TraceSink for FlowStatsBuilder {
    fn record(&mut self, rec: &TraceRecord) {
        self.observe(rec);
    }
}

pub fn flow_stats<'a>(
    records: impl IntoIterator<Item = &'a TraceRecord>,
    flow_id: u32,
    interval: Interval,
) -> FlowStats {
    let mut b = FlowStatsBuilder::new(flow_id, interval);
    for r in records {
        b.observe(r);
    }
    b.finish()
}

/// Delivered data rate at the flow's destination in Mbps.
pub fn throughput(records: &[TraceRecord], flow_id: u32, interval: Interval) -> f64 {
    flow_stats(records, flow_id, interval).throughput_mbps
}

pub fn drop_rate(records: &[TraceRecord], flow_id: u32, interval: Interval) -> DropRate {
    let s = flow_stats(records, flow_id, interval);
    DropRate {
        fraction: s.drop_rate,
        count: s.dropped_packets,
    }
}

/// Mean source-to-destination delay of packets delivered in the interval.
pub fn avg_latency(records: &[TraceRecord], flow_id: u32, interval: Interval) -> Option<f64> {
    flow_stats(records, flow_id, interval).avg_latency
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Throughput,
    Latency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesPoint {
    pub bucket_start: f64,
    /// Mbps for throughput, seconds for latency; `None` for a latency bucket
    /// with no deliveries.
    pub value: Option<f64>,
}

/// Per-bucket throughput and latency of one flow over `[0, end)`.
#[derive(Debug, Clone)]
pub struct TimeSeriesBuilder {
    flow_id: u32,
    width: SimTime,
    tracker: LatencyTracker,
    bytes: Vec<u64>,
    latency_sum: Vec<f64>,
    latency_n: Vec<u64>,
}

impl TimeSeriesBuilder {
    pub fn new(flow_id: u32, bucket_width: f64, end: SimTime) -> Result<Self> {
        if !(bucket_width > 0.0 && bucket_width.is_finite()) {
            return Err(Error::invalid(format!("bucket width must be > 0, got {bucket_width}")));
        }
        let width = SimTime::from_secs_f64(bucket_width)?;
        if width == SimTime::ZERO {
            return Err(Error::invalid("bucket width below one nanosecond"));
        }
        let n = end.as_nanos().div_ceil(width.as_nanos()).max(1) as usize;
        Ok(TimeSeriesBuilder {
            flow_id,
            width,
            tracker: LatencyTracker::default(),
            bytes: vec![0; n],
            latency_sum: vec![0.0; n],
            latency_n: vec![0; n],
        })
    }

    pub fn observe(&mut self, r: &TraceRecord) {
        if let Some(FlowEvent::Received { bytes, latency }) = self.tracker.classify(self.flow_id, r) {
            let i = (r.time.as_nanos() / self.width.as_nanos()) as usize;
            if i >= self.bytes.len() {
                return;
            }
            self.bytes[i] += bytes as u64;
            if let Some(l) = latency {
                self.latency_sum[i] += l;
                self.latency_n[i] += 1;
            }
        }
    }

    fn start(&self, i: usize) -> f64 {
        (i as u64 * self.width.as_nanos()) as f64 / 1e9
    }

    pub fn series(&self, metric: Metric) -> Vec<TimeSeriesPoint> {
        let w = self.width.as_secs_f64();
        (0..self.bytes.len())
            .map(|i| TimeSeriesPoint {
                bucket_start: self.start(i),
                value: match metric {
                    Metric::Throughput => Some(bits_to_mbps(self.bytes[i], w)),
                    Metric::Latency => {
                        (self.latency_n[i] > 0).then(|| self.latency_sum[i] / self.latency_n[i] as f64)
                    }
                },
            })
            .collect()
    }
}

impl TraceSink for TimeSeriesBuilder {
    fn record(&mut self, rec: &TraceRecord) {
        self.observe(rec);
    }
}

/// Buckets `[0, last record time]` into fixed-width windows.
pub fn time_series(
    records: &[TraceRecord],
    flow_id: u32,
    metric: Metric,
    bucket_width: f64,
) -> Result<Vec<TimeSeriesPoint>> {
    let last = records.iter().map(|r| r.time).max().unwrap_or(SimTime::ZERO);
    let end = SimTime::from_nanos(last.as_nanos() + 1);
    let mut b = TimeSeriesBuilder::new(flow_id, bucket_width, end)?;
    for r in records {
        b.observe(r);
    }
    Ok(b.series(metric))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fairness {
    /// `a / b`, absent when `b` is zero.
    pub ratio: Option<f64>,
    pub jain: f64,
}

/// `(sum x)^2 / (n * sum x^2)`; 1 for equal shares, `1/n` when one flow takes everything.
pub fn jain_index(xs: &[f64]) -> Result<f64> {
    if xs.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::invalid("throughputs must be finite and non-negative"));
    }
    let sum: f64 = xs.iter().sum();
    let sq: f64 = xs.iter().map(|x| x * x).sum();
    if sq == 0.0 {
        return Err(Error::invalid("fairness is undefined when every throughput is zero"));
    }
    Ok(sum * sum / (xs.len() as f64 * sq))
}

pub fn fairness(a: f64, b: f64) -> Result<Fairness> {
    let jain = jain_index(&[a, b])?;
    Ok(Fairness {
        ratio: (b != 0.0).then(|| a / b),
        jain,
    })
}
