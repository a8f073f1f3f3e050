use std::fmt::Display;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::net::{QueueDiscipline, QueueKind, RedParams};
use crate::sim::secs;
use crate::tcp::TcpConfig;

/// Every tunable of a run. Each field has a key in the `key = value` config
/// and metadata format; see [`SimParams::entries`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub bandwidth_mbps: f64,
    pub prop_delay_ms: f64,
    pub bottleneck_queue_limit: usize,
    pub edge_queue_limit: usize,
    pub red: RedParams,
    pub tcp: TcpConfig,
    pub cbr_packet_size: u32,
    /// Relative spread of CBR inter-departure gaps, see [`crate::tcp::CbrSource::jitter`].
    pub cbr_jitter: f64,
    /// Simulated seconds per run.
    pub duration: f64,
    /// Start of the measurement window for experiments 1 and 2.
    pub warmup: f64,
    /// Time-series bucket width.
    pub bucket: f64,
    /// CBR start in experiments 1 and 2.
    pub cbr_start: f64,
    pub exp3_cbr_start: f64,
    pub exp3_cbr_mbps: f64,
    pub tcp_start: f64,
    /// Start of the second TCP flow in experiment 2.
    pub tcp_b_start: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            bandwidth_mbps: 10.0,
            prop_delay_ms: 10.0,
            bottleneck_queue_limit: 100,
            edge_queue_limit: 50,
            red: RedParams::default(),
            tcp: TcpConfig::default(),
            cbr_packet_size: 1000,
            cbr_jitter: 1.0,
            duration: 30.0,
            warmup: 2.0,
            bucket: 0.5,
            cbr_start: 0.0,
            exp3_cbr_start: 5.0,
            exp3_cbr_mbps: 8.0,
            tcp_start: 0.0,
            tcp_b_start: 0.0,
            seed: 1,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| Error::config(format!("{key}: cannot parse {value:?}: {e}")))
}

impl SimParams {
    /// All parameters in a fixed order, formatted as they are written to metadata.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let t = &self.tcp;
        vec![
            ("bandwidth_mbps", self.bandwidth_mbps.to_string()),
            ("prop_delay_ms", self.prop_delay_ms.to_string()),
            ("bottleneck_queue_limit", self.bottleneck_queue_limit.to_string()),
            ("edge_queue_limit", self.edge_queue_limit.to_string()),
            ("red_min_th", self.red.min_th.to_string()),
            ("red_max_th", self.red.max_th.to_string()),
            ("red_max_p", self.red.max_p.to_string()),
            ("red_w_q", self.red.w_q.to_string()),
            ("segment_size", t.segment_size.to_string()),
            ("ack_size", t.ack_size.to_string()),
            ("rcv_wnd", t.rcv_wnd.to_string()),
            ("initial_cwnd", t.initial_cwnd.to_string()),
            ("initial_ssthresh", t.initial_ssthresh.to_string()),
            ("rto_initial", t.rtt.initial_rto.to_string()),
            ("rto_min", t.rtt.min_rto.to_string()),
            ("rto_max", t.rtt.max_rto.to_string()),
            ("vegas_alpha", t.vegas.alpha.to_string()),
            ("vegas_beta", t.vegas.beta.to_string()),
            ("vegas_gamma", t.vegas.gamma.to_string()),
            ("cbr_packet_size", self.cbr_packet_size.to_string()),
            ("cbr_jitter", self.cbr_jitter.to_string()),
            ("duration", self.duration.to_string()),
            ("warmup", self.warmup.to_string()),
            ("bucket", self.bucket.to_string()),
            ("cbr_start", self.cbr_start.to_string()),
            ("exp3_cbr_start", self.exp3_cbr_start.to_string()),
            ("exp3_cbr_mbps", self.exp3_cbr_mbps.to_string()),
            ("tcp_start", self.tcp_start.to_string()),
            ("tcp_b_start", self.tcp_b_start.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let t = &mut self.tcp;
        match key.trim() {
            "bandwidth_mbps" => self.bandwidth_mbps = parse(key, v)?,
            "prop_delay_ms" => self.prop_delay_ms = parse(key, v)?,
            "bottleneck_queue_limit" => self.bottleneck_queue_limit = parse(key, v)?,
            "edge_queue_limit" => self.edge_queue_limit = parse(key, v)?,
            "red_min_th" => self.red.min_th = parse(key, v)?,
            "red_max_th" => self.red.max_th = parse(key, v)?,
            "red_max_p" => self.red.max_p = parse(key, v)?,
            "red_w_q" => self.red.w_q = parse(key, v)?,
            "segment_size" => t.segment_size = parse(key, v)?,
            "ack_size" => t.ack_size = parse(key, v)?,
            "rcv_wnd" => t.rcv_wnd = parse(key, v)?,
            "initial_cwnd" => t.initial_cwnd = parse(key, v)?,
            "initial_ssthresh" => t.initial_ssthresh = parse(key, v)?,
            "rto_initial" => t.rtt.initial_rto = parse(key, v)?,
            "rto_min" => t.rtt.min_rto = parse(key, v)?,
            "rto_max" => t.rtt.max_rto = parse(key, v)?,
            "vegas_alpha" => t.vegas.alpha = parse(key, v)?,
            "vegas_beta" => t.vegas.beta = parse(key, v)?,
            "vegas_gamma" => t.vegas.gamma = parse(key, v)?,
            "cbr_packet_size" => self.cbr_packet_size = parse(key, v)?,
            "cbr_jitter" => self.cbr_jitter = parse(key, v)?,
            "duration" => self.duration = parse(key, v)?,
            "warmup" => self.warmup = parse(key, v)?,
            "bucket" => self.bucket = parse(key, v)?,
            "cbr_start" => self.cbr_start = parse(key, v)?,
            "exp3_cbr_start" => self.exp3_cbr_start = parse(key, v)?,
            "exp3_cbr_mbps" => self.exp3_cbr_mbps = parse(key, v)?,
            "tcp_start" => self.tcp_start = parse(key, v)?,
            "tcp_b_start" => self.tcp_b_start = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            other => return Err(Error::config(format!("unknown parameter {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are ignored; unknown keys are an error.
    pub fn apply_config<R: BufRead>(&mut self, reader: R) -> Result<()> {
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value, got {line:?}", i + 1)))?;
            self.set(k, v)?;
        }
        self.validate()
    }

    pub fn write_kv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in self.entries() {
            writeln!(out, "{k} = {v}")?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("bandwidth_mbps", self.bandwidth_mbps),
            ("duration", self.duration),
            ("bucket", self.bucket),
            ("exp3_cbr_mbps", self.exp3_cbr_mbps),
            ("initial_cwnd", self.tcp.initial_cwnd),
            ("initial_ssthresh", self.tcp.initial_ssthresh),
            ("rto_initial", self.tcp.rtt.initial_rto),
            ("rto_min", self.tcp.rtt.min_rto),
        ];
        for (k, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{k} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("prop_delay_ms", self.prop_delay_ms),
            ("warmup", self.warmup),
            ("cbr_start", self.cbr_start),
            ("exp3_cbr_start", self.exp3_cbr_start),
            ("tcp_start", self.tcp_start),
            ("tcp_b_start", self.tcp_b_start),
        ];
        for (k, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("{k} must be >= 0, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.cbr_jitter) {
            return Err(Error::config(format!("cbr_jitter must be in [0, 1], got {}", self.cbr_jitter)));
        }
        if self.warmup >= self.duration {
            return Err(Error::config("warmup must end before the run does"));
        }
        if self.tcp.rtt.max_rto < self.tcp.rtt.min_rto {
            return Err(Error::config("rto_max must be >= rto_min"));
        }
        if self.tcp.segment_size == 0 || self.tcp.ack_size == 0 || self.cbr_packet_size == 0 {
            return Err(Error::config("packet sizes must be > 0"));
        }
        if self.tcp.rcv_wnd == 0 {
            return Err(Error::config("rcv_wnd must be > 0"));
        }
        let v = &self.tcp.vegas;
        if !(0.0 < v.alpha && v.alpha <= v.beta && v.gamma > 0.0) {
            return Err(Error::config("vegas thresholds need 0 < alpha <= beta and gamma > 0"));
        }
        self.queue(QueueKind::Red)?.validate()?;
        self.edge_queue().validate()
    }

    pub fn bandwidth_bps(&self) -> f64 {
        self.bandwidth_mbps * 1e6
    }

    pub fn prop_delay(&self) -> Result<Duration> {
        secs(self.prop_delay_ms / 1e3)
    }

    /// Bottleneck discipline of the given kind.
    pub fn queue(&self, kind: QueueKind) -> Result<QueueDiscipline> {
        let q = match kind {
            QueueKind::DropTail => QueueDiscipline::drop_tail(self.bottleneck_queue_limit),
            QueueKind::Red => QueueDiscipline::red(self.bottleneck_queue_limit, self.red),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn edge_queue(&self) -> QueueDiscipline {
        QueueDiscipline::drop_tail(self.edge_queue_limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metadata_round_trips_through_config() {
        let mut p = SimParams {
            seed: 42,
            bucket: 0.25,
            ..SimParams::default()
        };
        p.red.max_p = 0.1;
        p.tcp.rcv_wnd = 33;
        let mut buf = Vec::new();
        p.write_kv(&mut buf).unwrap();
        let mut q = SimParams::default();
        q.apply_config(buf.as_slice()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn config_errors() {
        let mut p = SimParams::default();
        assert!(p.apply_config("nonsense = 1".as_bytes()).is_err());
        assert!(p.apply_config("duration 3".as_bytes()).is_err());
        assert!(p.apply_config("duration = abc".as_bytes()).is_err());
        assert!(p.apply_config("red_min_th = 20".as_bytes()).is_err());
        let mut p = SimParams::default();
        p.apply_config("# comment\n\n duration = 10 \nseed=7\n".as_bytes()).unwrap();
        assert_eq!((p.duration, p.seed), (10.0, 7));
    }

    #[test]
    fn every_entry_is_settable() {
        let p = SimParams::default();
        let mut q = SimParams::default();
        for (k, v) in p.entries() {
            q.set(k, &v).unwrap();
        }
        assert_eq!(p, q);
    }
}
