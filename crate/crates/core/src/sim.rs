//! Discrete-event core: a nanosecond clock and a cancellable event queue.
//!
//! Events are totally ordered by `(fire_at, seq)` where `seq` is a per-queue
//! insertion counter, so two events scheduled for the same instant fire in the
//! order they were scheduled. The scheduler is generic over the event payload;
//! the owner of the simulation decides what an event means.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::ops::{Add, Sub};
use std::time::Duration;

use crate::error::{Error, Result};

const NANOS_PER_SEC: u64 = 1_000_000_000;

/// Simulated time since the start of a run, in integer nanoseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_nanos(nanos: u64) -> Self {
        SimTime(nanos)
    }

    /// Rounds to the nearest nanosecond. Rejects negative and non-finite input.
    pub fn from_secs_f64(secs: f64) -> Result<Self> {
        if !secs.is_finite() || secs < 0.0 {
            return Err(Error::invalid(format!("time must be a non-negative number, got {secs}")));
        }
        Ok(SimTime((secs * NANOS_PER_SEC as f64).round() as u64))
    }

    pub const fn as_nanos(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / NANOS_PER_SEC as f64
    }

    pub fn saturating_since(self, earlier: SimTime) -> Duration {
        Duration::from_nanos(self.0.saturating_sub(earlier.0))
    }
}

impl Add<Duration> for SimTime {
    type Output = SimTime;

    fn add(self, rhs: Duration) -> SimTime {
        SimTime(self.0 + rhs.as_nanos() as u64)
    }
}

impl Sub for SimTime {
    type Output = Duration;

    fn sub(self, rhs: SimTime) -> Duration {
        self.saturating_since(rhs)
    }
}

/// Shortest decimal rendering in seconds that maps back to the same
/// nanosecond value: `1356000000ns` renders as `1.356`, whole seconds have
/// no fractional part.
impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let secs = self.0 / NANOS_PER_SEC;
        let frac = self.0 % NANOS_PER_SEC;
        if frac == 0 {
            return write!(f, "{secs}");
        }
        let digits = format!("{frac:09}");
        write!(f, "{secs}.{}", digits.trim_end_matches('0'))
    }
}

/// Converts a non-negative number of seconds into a `Duration`.
pub fn secs(value: f64) -> Result<Duration> {
    SimTime::from_secs_f64(value).map(|t| Duration::from_nanos(t.as_nanos()))
}

/// Time to clock `bytes` onto a link of `bandwidth_bps`, rounded to the
/// nearest nanosecond.
pub fn serialization_delay(bytes: u32, bandwidth_bps: f64) -> Duration {
    let nanos = (bytes as f64 * 8.0 * NANOS_PER_SEC as f64 / bandwidth_bps).round();
    Duration::from_nanos(nanos as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle(u64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimStats {
    pub events_processed: u64,
    pub final_time: SimTime,
}

#[derive(Debug, PartialEq, Eq)]
struct Key {
    fire_at: SimTime,
    seq: u64,
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fire_at, self.seq).cmp(&(other.fire_at, other.seq))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Priority queue of pending events plus the simulated clock.
#[derive(Debug)]
pub struct Scheduler<E> {
    now: SimTime,
    next_seq: u64,
    heap: BinaryHeap<Reverse<Key>>,
    pending: HashMap<u64, E>,
    processed: u64,
}

impl<E> Default for Scheduler<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> Scheduler<E> {
    pub fn new() -> Self {
        Scheduler {
            now: SimTime::ZERO,
            next_seq: 0,
            heap: BinaryHeap::new(),
            pending: HashMap::new(),
            processed: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn events_processed(&self) -> u64 {
        self.processed
    }

    /// Number of events scheduled and neither fired nor cancelled.
    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn schedule(&mut self, delay: Duration, event: E) -> EventHandle {
        let at = self.now + delay;
        self.insert(at, event)
    }

    /// Like [`Scheduler::schedule`] with the delay given in seconds.
    pub fn schedule_secs(&mut self, delay: f64, event: E) -> Result<EventHandle> {
        if delay.is_nan() || delay < 0.0 {
            return Err(Error::invalid(format!("event delay must be >= 0, got {delay}")));
        }
        Ok(self.schedule(secs(delay)?, event))
    }

    pub fn schedule_at(&mut self, at: SimTime, event: E) -> Result<EventHandle> {
        if at < self.now {
            return Err(Error::invalid(format!(
                "cannot schedule at {at}s, clock is already at {}s",
                self.now
            )));
        }
        Ok(self.insert(at, event))
    }

    fn insert(&mut self, fire_at: SimTime, event: E) -> EventHandle {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Key { fire_at, seq }));
        self.pending.insert(seq, event);
        EventHandle(seq)
    }

    /// Returns true iff the event was still pending. A cancelled event never fires.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        self.pending.remove(&handle.0).is_some()
    }

    /// Pops the next live event firing at or before `t_end`, advancing the clock to it.
    pub fn pop_until(&mut self, t_end: SimTime) -> Option<(SimTime, E)> {
        loop {
            let Reverse(key) = self.heap.peek()?;
            if key.fire_at > t_end {
                return None;
            }
            let Reverse(key) = self.heap.pop().expect("peeked");
            if let Some(event) = self.pending.remove(&key.seq) {
                debug_assert!(key.fire_at >= self.now);
                self.now = key.fire_at;
                self.processed += 1;
                return Some((key.fire_at, event));
            }
        }
    }

    /// Pending events in no particular order.
    pub fn pending(&self) -> impl Iterator<Item = &E> {
        self.pending.values()
    }

    /// Processes every event with `fire_at <= t_end` in `(fire_at, seq)` order.
    /// The handler may schedule further events through the scheduler it is given.
    pub fn run_until<F>(&mut self, t_end: SimTime, mut handler: F) -> Result<SimStats>
    where
        F: FnMut(&mut Scheduler<E>, E) -> Result<()>,
    {
        if t_end < self.now {
            return Err(Error::invalid(format!(
                "run_until({t_end}) is earlier than the current time {}",
                self.now
            )));
        }
        let start = self.processed;
        while let Some((_, event)) = self.pop_until(t_end) {
            handler(self, event)?;
        }
        Ok(SimStats {
            events_processed: self.processed - start,
            final_time: self.now,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_time_events_fire_in_insertion_order() {
        let mut s = Scheduler::new();
        s.schedule(Duration::ZERO, 'a');
        s.schedule(Duration::ZERO, 'b');
        let mut seen = vec![];
        s.run_until(SimTime::from_nanos(0), |_, e| {
            seen.push(e);
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, vec!['a', 'b']);
    }

    #[test]
    fn delay_is_relative_to_now() {
        let mut s = Scheduler::new();
        s.schedule_secs(2.0, 0).unwrap();
        let mut fired = vec![];
        s.run_until(SimTime::from_secs_f64(2.0).unwrap(), |s, e| {
            if e == 0 {
                s.schedule_secs(1.5, 1).unwrap();
            }
            Ok(())
        })
        .unwrap();
        s.run_until(SimTime::from_secs_f64(10.0).unwrap(), |s, e| {
            fired.push((s.now(), e));
            Ok(())
        })
        .unwrap();
        assert_eq!(fired, vec![(SimTime::from_secs_f64(3.5).unwrap(), 1)]);
    }

    #[test]
    fn negative_delay_is_rejected() {
        let mut s: Scheduler<()> = Scheduler::new();
        assert!(matches!(s.schedule_secs(-1.0, ()), Err(Error::InvalidInput(_))));
        assert!(s.schedule_secs(f64::NAN, ()).is_err());
    }

    #[test]
    fn cancel_is_idempotent() {
        let mut s = Scheduler::new();
        let h = s.schedule_secs(1.0, ()).unwrap();
        assert!(s.cancel(h));
        assert!(!s.cancel(h));
        let stats = s.run_until(SimTime::from_nanos(5_000_000_000), |_, _| Ok(())).unwrap();
        assert_eq!(stats.events_processed, 0);
    }

    #[test]
    fn cancel_after_fire_returns_false() {
        let mut s = Scheduler::new();
        let h = s.schedule_secs(1.0, ()).unwrap();
        s.run_until(SimTime::from_nanos(2_000_000_000), |_, _| Ok(())).unwrap();
        assert!(!s.cancel(h));
    }

    #[test]
    fn empty_run() {
        let mut s: Scheduler<()> = Scheduler::new();
        let stats = s.run_until(SimTime::from_secs_f64(10.0).unwrap(), |_, _| Ok(())).unwrap();
        assert_eq!(stats.events_processed, 0);
        assert_eq!(stats.final_time, SimTime::ZERO);
    }

    #[test]
    fn run_until_includes_boundary() {
        let mut s = Scheduler::new();
        for t in [1.0, 1.0, 2.0] {
            s.schedule_secs(t, ()).unwrap();
        }
        let stats = s.run_until(SimTime::from_secs_f64(1.5).unwrap(), |_, _| Ok(())).unwrap();
        assert_eq!(stats.events_processed, 2);
        assert_eq!(stats.final_time, SimTime::from_secs_f64(1.0).unwrap());
        let mut s = Scheduler::new();
        s.schedule_secs(1.0, ()).unwrap();
        let stats = s.run_until(SimTime::from_secs_f64(1.0).unwrap(), |_, _| Ok(())).unwrap();
        assert_eq!(stats.events_processed, 1);
    }

    #[test]
    fn past_events_are_rejected_mid_run() {
        let mut s = Scheduler::new();
        s.schedule_secs(2.0, ()).unwrap();
        let mut rejected = false;
        s.run_until(SimTime::from_secs_f64(3.0).unwrap(), |s, _| {
            rejected = s.schedule_at(SimTime::from_secs_f64(1.0).unwrap(), ()).is_err();
            Ok(())
        })
        .unwrap();
        assert!(rejected);
    }

    #[test]
    fn run_until_rejects_time_travel() {
        let mut s = Scheduler::new();
        s.schedule_secs(2.0, ()).unwrap();
        s.run_until(SimTime::from_secs_f64(3.0).unwrap(), |_, _| Ok(())).unwrap();
        assert!(s.run_until(SimTime::from_secs_f64(1.0).unwrap(), |_, _| Ok(())).is_err());
    }

    #[test]
    fn time_display_is_shortest_decimal() {
        assert_eq!(SimTime::from_nanos(1_356_000_000).to_string(), "1.356");
        assert_eq!(SimTime::from_nanos(1_355_760_000).to_string(), "1.35576");
        assert_eq!(SimTime::from_nanos(2_000_000_000).to_string(), "2");
        assert_eq!(SimTime::from_nanos(1).to_string(), "0.000000001");
        assert_eq!(SimTime::ZERO.to_string(), "0");
    }

    #[test]
    fn serialization_of_common_sizes() {
        assert_eq!(serialization_delay(1000, 10e6), Duration::from_micros(800));
        assert_eq!(serialization_delay(40, 10e6), Duration::from_micros(32));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn fire_times_are_monotone(delays in proptest::collection::vec(0u64..1_000, 1..200)) {
                let mut s = Scheduler::new();
                for (i, d) in delays.iter().enumerate() {
                    s.schedule(Duration::from_millis(*d), i);
                }
                let mut fired = vec![];
                s.run_until(SimTime::from_nanos(u64::MAX / 2), |s, i| {
                    fired.push((s.now(), i));
                    Ok(())
                }).unwrap();
                prop_assert_eq!(fired.len(), delays.len());
                for w in fired.windows(2) {
                    prop_assert!(w[0].0 <= w[1].0);
                    if w[0].0 == w[1].0 {
                        prop_assert!(w[0].1 < w[1].1);
                    }
                }
            }
        }
    }
}
