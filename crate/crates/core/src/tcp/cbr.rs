use std::time::Duration;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{serialization_delay, SimTime};

/// Constant bit rate source: fixed-size packets at a fixed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CbrSource {
    pub rate_bps: f64,
    pub packet_size: u32,
    pub start_at: SimTime,
    pub stop_at: SimTime,
    /// Each gap is `interval * (1 + jitter * u)` with `u` uniform in
    /// `[-0.5, 0.5)`. Zero keeps the source strictly periodic.
    pub jitter: f64,
    next_seq: u64,
}

impl CbrSource {
    pub fn new(rate_bps: f64, packet_size: u32, start_at: SimTime, stop_at: SimTime) -> Result<Self> {
        if !(rate_bps.is_finite() && rate_bps > 0.0) {
            return Err(Error::config(format!("CBR rate must be > 0, got {rate_bps}")));
        }
        if packet_size == 0 {
            return Err(Error::config("CBR packet size must be > 0"));
        }
        Ok(CbrSource {
            rate_bps,
            packet_size,
            start_at,
            stop_at,
            jitter: 0.0,
            next_seq: 0,
        })
    }

    pub fn with_jitter(mut self, jitter: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&jitter) {
            return Err(Error::config(format!("CBR jitter must be in [0, 1], got {jitter}")));
        }
        self.jitter = jitter;
        Ok(self)
    }

    /// `packet_size * 8 / rate`.
    pub fn interval(&self) -> Duration {
        serialization_delay(self.packet_size, self.rate_bps)
    }

    pub fn packets_sent(&self) -> u64 {
        self.next_seq
    }

    /// Emits one packet at `now`. Returns its sequence number and the next
    /// departure time, or `None` for the latter once the source stops.
    /// `rng` is only drawn from when jitter is enabled.
    pub fn emit<R: Rng + ?Sized>(&mut self, now: SimTime, rng: &mut R) -> Option<(u64, Option<SimTime>)> {
        if now < self.start_at || now >= self.stop_at {
            return None;
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        let gap = if self.jitter > 0.0 {
            self.interval().mul_f64(1.0 + self.jitter * (rng.gen::<f64>() - 0.5))
        } else {
            self.interval()
        };
        let next = now + gap;
        Some((seq, (next < self.stop_at).then_some(next)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn src(rate: f64) -> CbrSource {
        CbrSource::new(rate, 1000, SimTime::ZERO, SimTime::from_nanos(1_000_000_000)).unwrap()
    }

    #[test]
    fn inter_departure_times() {
        assert_eq!(src(1e6).interval(), Duration::from_millis(8));
        assert_eq!(src(10e6).interval(), Duration::from_micros(800));
        assert_eq!(src(12e6).interval(), Duration::from_nanos(666_667));
    }

    #[test]
    fn emits_until_stop() {
        let mut s = src(1e6);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut now = SimTime::ZERO;
        let mut n = 0;
        while let Some((seq, next)) = s.emit(now, &mut rng) {
            assert_eq!(seq, n);
            n += 1;
            match next {
                Some(t) => now = t,
                None => break,
            }
        }
        assert_eq!(n, 125);
        assert!(s.emit(SimTime::from_nanos(1_000_000_000), &mut rng).is_none());
    }

    #[test]
    fn jitter_keeps_the_mean_rate() {
        let mut s = src(1e6).with_jitter(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut now = SimTime::ZERO;
        let mut gaps = vec![];
        while let Some((_, Some(next))) = s.emit(now, &mut rng) {
            gaps.push((next - now).as_secs_f64());
            now = next;
        }
        assert!(gaps.iter().all(|g| (0.004..0.012).contains(g)));
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        assert!((mean - 0.008).abs() < 0.0005, "mean gap {mean}");
        assert!(src(1e6).with_jitter(1.5).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(CbrSource::new(0.0, 1000, SimTime::ZERO, SimTime::ZERO).is_err());
        assert!(CbrSource::new(1e6, 0, SimTime::ZERO, SimTime::ZERO).is_err());
    }
}
