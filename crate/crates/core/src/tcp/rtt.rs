//! Smoothed RTT and retransmission timeout (Jacobson/Karels, Karn backoff).

use std::time::Duration;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RttConfig {
    pub initial_rto: f64,
    pub min_rto: f64,
    pub max_rto: f64,
}

impl Default for RttConfig {
    fn default() -> Self {
        RttConfig {
            initial_rto: 1.0,
            min_rto: 0.2,
            max_rto: 64.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RttEstimator {
    cfg: RttConfig,
    srtt: Option<f64>,
    rttvar: f64,
    rto: f64,
    backoff: u32,
}

impl RttEstimator {
    pub fn new(cfg: RttConfig) -> Self {
        RttEstimator {
            cfg,
            srtt: None,
            rttvar: 0.0,
            rto: cfg.initial_rto,
            backoff: 1,
        }
    }

    pub fn srtt(&self) -> Option<f64> {
        self.srtt
    }

    pub fn rttvar(&self) -> f64 {
        self.rttvar
    }

    /// Base timeout before backoff, seconds.
    pub fn rto(&self) -> f64 {
        self.rto
    }

    pub fn backoff(&self) -> u32 {
        self.backoff
    }

    /// Feeds one sample in seconds. Callers must not pass samples taken from
    /// retransmitted segments.
    pub fn update(&mut self, sample: f64) -> Result<()> {
        if !(sample > 0.0 && sample.is_finite()) {
            return Err(Error::invalid(format!("RTT sample must be > 0, got {sample}")));
        }
        match self.srtt {
            None => {
                self.srtt = Some(sample);
                self.rttvar = sample / 2.0;
            }
            Some(srtt) => {
                self.rttvar = 0.75 * self.rttvar + 0.25 * (srtt - sample).abs();
                self.srtt = Some(0.875 * srtt + 0.125 * sample);
            }
        }
        let srtt = self.srtt.expect("set above");
        self.rto = (srtt + 4.0 * self.rttvar).clamp(self.cfg.min_rto, self.cfg.max_rto);
        self.backoff = 1;
        Ok(())
    }

    /// Current timer value including exponential backoff, capped at the maximum RTO.
    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64((self.rto * self.backoff as f64).min(self.cfg.max_rto))
    }

    pub fn back_off(&mut self) {
        if self.rto * (self.backoff as f64) < self.cfg.max_rto {
            self.backoff = self.backoff.saturating_mul(2);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_sample_initializes() {
        let mut e = RttEstimator::new(RttConfig::default());
        e.update(0.1).unwrap();
        assert_eq!(e.srtt(), Some(0.1));
        assert!((e.rttvar() - 0.05).abs() < 1e-15);
        assert!((e.rto() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn constant_samples_converge() {
        let mut e = RttEstimator::new(RttConfig::default());
        for _ in 0..200 {
            e.update(0.05).unwrap();
        }
        assert!((e.srtt().unwrap() - 0.05).abs() < 1e-9);
        assert!(e.rttvar() < 1e-9);
        // srtt below the floor: rto settles at rto_min
        assert!((e.rto() - 0.2).abs() < 1e-9);

        let mut e = RttEstimator::new(RttConfig::default());
        for _ in 0..200 {
            e.update(0.5).unwrap();
        }
        assert!((e.rto() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_positive_samples() {
        let mut e = RttEstimator::new(RttConfig::default());
        assert!(e.update(0.0).is_err());
        assert!(e.update(-0.1).is_err());
        assert_eq!(e.srtt(), None);
    }

    #[test]
    fn backoff_doubles_and_caps() {
        let mut e = RttEstimator::new(RttConfig::default());
        let mut seen = vec![e.timeout().as_secs_f64()];
        for _ in 0..10 {
            e.back_off();
            seen.push(e.timeout().as_secs_f64());
        }
        assert_eq!(&seen[..4], &[1.0, 2.0, 4.0, 8.0]);
        assert_eq!(*seen.last().unwrap(), 64.0);
        e.update(0.1).unwrap();
        assert_eq!(e.backoff(), 1);
    }
}
