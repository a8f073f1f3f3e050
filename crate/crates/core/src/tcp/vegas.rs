//! Delay-based window control: compare expected and actual rate once per RTT.

use crate::error::{Error, Result};

use super::Phase;

/// Thresholds in segments of queued data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VegasParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for VegasParams {
    fn default() -> Self {
        VegasParams {
            alpha: 1.0,
            beta: 3.0,
            gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VegasState {
    pub params: VegasParams,
    base_rtt: Option<f64>,
    /// The RTT epoch ends when this segment is acknowledged.
    pub(crate) epoch_end: u64,
    pub(crate) epoch_min_rtt: Option<f64>,
    /// Slow start only grows on every other RTT.
    pub(crate) grow_this_rtt: bool,
}

impl VegasState {
    pub fn new(params: VegasParams) -> Self {
        VegasState {
            params,
            base_rtt: None,
            epoch_end: 0,
            epoch_min_rtt: None,
            grow_this_rtt: true,
        }
    }

    pub fn base_rtt(&self) -> Option<f64> {
        self.base_rtt
    }

    pub(crate) fn observe(&mut self, sample: f64) {
        self.base_rtt = Some(self.base_rtt.map_or(sample, |b| b.min(sample)));
        self.epoch_min_rtt = Some(self.epoch_min_rtt.map_or(sample, |b| b.min(sample)));
    }

    /// Extra segments queued in the network: `(cwnd/base - cwnd/rtt) * base`.
    pub fn queued_estimate(&self, cwnd: f64, rtt: f64) -> Option<f64> {
        let base = self.base_rtt?;
        Some((cwnd / base - cwnd / rtt) * base)
    }

    /// Once-per-RTT window decision. Returns the new window and phase.
    ///
    /// In congestion avoidance the window grows by one below `alpha`, shrinks
    /// by one above `beta` and holds in between. In slow start a queue estimate
    /// above `gamma` ends slow start and trims the window to the rate actually
    /// achieved plus one segment.
    pub fn adjust(&mut self, cwnd: f64, phase: Phase, rtt_sample: f64) -> Result<(f64, Phase)> {
        if !(rtt_sample > 0.0 && rtt_sample.is_finite()) {
            return Err(Error::invalid(format!("RTT sample must be > 0, got {rtt_sample}")));
        }
        self.base_rtt = Some(self.base_rtt.map_or(rtt_sample, |b| b.min(rtt_sample)));
        let diff = self.queued_estimate(cwnd, rtt_sample).expect("base set");
        let p = self.params;
        Ok(match phase {
            Phase::SlowStart if diff > p.gamma => {
                let target = cwnd * self.base_rtt.expect("base set") / rtt_sample;
                (cwnd.min(target + 1.0).max(2.0_f64.min(cwnd)), Phase::CongestionAvoidance)
            }
            Phase::SlowStart => (cwnd, Phase::SlowStart),
            Phase::CongestionAvoidance if diff < p.alpha => (cwnd + 1.0, phase),
            Phase::CongestionAvoidance if diff > p.beta => ((cwnd - 1.0).max(2.0_f64.min(cwnd)), phase),
            other => (cwnd, other),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_base(base: f64) -> VegasState {
        let mut v = VegasState::new(VegasParams::default());
        v.observe(base);
        v
    }

    #[test]
    fn no_queueing_grows() {
        let mut v = with_base(0.1);
        assert_eq!(v.adjust(10.0, Phase::CongestionAvoidance, 0.1).unwrap(), (11.0, Phase::CongestionAvoidance));
    }

    #[test]
    fn inside_band_holds() {
        // diff = (100 - 80) * 0.1 = 2
        let mut v = with_base(0.1);
        assert!((v.queued_estimate(10.0, 0.125).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(v.adjust(10.0, Phase::CongestionAvoidance, 0.125).unwrap(), (10.0, Phase::CongestionAvoidance));
    }

    #[test]
    fn above_beta_shrinks() {
        // diff = (100 - 50) * 0.1 = 5
        let mut v = with_base(0.1);
        assert_eq!(v.adjust(10.0, Phase::CongestionAvoidance, 0.2).unwrap(), (9.0, Phase::CongestionAvoidance));
    }

    #[test]
    fn smaller_sample_lowers_base() {
        let mut v = with_base(0.1);
        v.adjust(10.0, Phase::CongestionAvoidance, 0.05).unwrap();
        assert_eq!(v.base_rtt(), Some(0.05));
    }

    #[test]
    fn slow_start_exit_on_gamma() {
        let mut v = with_base(0.1);
        assert_eq!(v.adjust(8.0, Phase::SlowStart, 0.105).unwrap(), (8.0, Phase::SlowStart));
        let (cwnd, phase) = v.adjust(16.0, Phase::SlowStart, 0.2).unwrap();
        assert_eq!(phase, Phase::CongestionAvoidance);
        assert_eq!(cwnd, 9.0);
    }

    #[test]
    fn rejects_bad_samples() {
        let mut v = with_base(0.1);
        assert!(v.adjust(10.0, Phase::CongestionAvoidance, 0.0).is_err());
        assert!(v.adjust(10.0, Phase::CongestionAvoidance, -1.0).is_err());
    }
}
