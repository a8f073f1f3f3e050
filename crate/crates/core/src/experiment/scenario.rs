use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::net::{NodeId, QueueKind};
use crate::tcp::TcpVariant;

use super::SimParams;

pub const TCP_A: u32 = 1;
pub const TCP_B: u32 = 2;
pub const CBR: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    /// One TCP flow against a CBR sweep.
    Congestion,
    /// Two TCP flows sharing the bottleneck.
    Fairness,
    /// One TCP and one CBR flow under a chosen bottleneck queue.
    Queueing,
}

impl Experiment {
    pub fn number(self) -> u8 {
        match self {
            Experiment::Congestion => 1,
            Experiment::Fairness => 2,
            Experiment::Queueing => 3,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Experiment::Congestion),
            "2" => Ok(Experiment::Fairness),
            "3" => Ok(Experiment::Queueing),
            other => Err(Error::invalid(format!("experiment must be 1, 2 or 3, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowKind {
    Tcp(TcpVariant),
    Cbr { rate_mbps: f64 },
}

/// One traffic flow of a scenario, from `src` to `dst`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSpec {
    pub flow_id: u32,
    pub kind: FlowKind,
    pub src: NodeId,
    pub dst: NodeId,
    pub port: u32,
    pub start: f64,
}

impl FlowSpec {
    pub fn label(&self) -> &'static str {
        match self.kind {
            FlowKind::Tcp(v) => v.as_str(),
            FlowKind::Cbr { .. } => "cbr",
        }
    }

    pub fn is_tcp(&self) -> bool {
        matches!(self.kind, FlowKind::Tcp(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub experiment: Experiment,
    /// One variant for experiments 1 and 3, an ordered pair for experiment 2.
    pub variants: Vec<TcpVariant>,
    pub cbr_mbps: f64,
    pub queue: QueueKind,
    pub seed: u64,
    pub duration: f64,
    pub cbr_start: f64,
    pub tcp_starts: Vec<f64>,
}

impl Scenario {
    pub fn exp1(variant: TcpVariant, cbr_mbps: f64, params: &SimParams) -> Self {
        Scenario {
            experiment: Experiment::Congestion,
            variants: vec![variant],
            cbr_mbps,
            queue: QueueKind::DropTail,
            seed: params.seed,
            duration: params.duration,
            cbr_start: params.cbr_start,
            tcp_starts: vec![params.tcp_start],
        }
    }

    pub fn exp2(pair: (TcpVariant, TcpVariant), cbr_mbps: f64, params: &SimParams) -> Self {
        Scenario {
            experiment: Experiment::Fairness,
            variants: vec![pair.0, pair.1],
            cbr_mbps,
            queue: QueueKind::DropTail,
            seed: params.seed,
            duration: params.duration,
            cbr_start: params.cbr_start,
            tcp_starts: vec![params.tcp_start, params.tcp_b_start],
        }
    }

    pub fn exp3(variant: TcpVariant, queue: QueueKind, params: &SimParams) -> Self {
        Scenario {
            experiment: Experiment::Queueing,
            variants: vec![variant],
            cbr_mbps: params.exp3_cbr_mbps,
            queue,
            seed: params.seed,
            duration: params.duration,
            cbr_start: params.exp3_cbr_start,
            tcp_starts: vec![params.tcp_start],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let want = match self.experiment {
            Experiment::Fairness => 2,
            _ => 1,
        };
        if self.variants.len() != want || self.tcp_starts.len() != want {
            return Err(Error::config(format!(
                "experiment {} takes {want} TCP flow(s), got {}",
                self.experiment,
                self.variants.len()
            )));
        }
        if !(self.cbr_mbps.is_finite() && self.cbr_mbps > 0.0) {
            return Err(Error::config(format!("CBR rate must be > 0 Mbps, got {}", self.cbr_mbps)));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::config(format!("duration must be > 0, got {}", self.duration)));
        }
        for t in self.tcp_starts.iter().chain([&self.cbr_start]) {
            if !(t.is_finite() && *t >= 0.0 && *t < self.duration) {
                return Err(Error::config(format!("start time {t} outside [0, {})", self.duration)));
            }
        }
        Ok(())
    }

    /// Flow placement on the dumbbell, TCP flows first.
    pub fn flows(&self) -> Result<Vec<FlowSpec>> {
        self.validate()?;
        let tcp = |flow_id, v, src, dst, start| FlowSpec {
            flow_id,
            kind: FlowKind::Tcp(v),
            src,
            dst,
            port: 0,
            start,
        };
        let cbr = |src, dst| FlowSpec {
            flow_id: CBR,
            kind: FlowKind::Cbr {
                rate_mbps: self.cbr_mbps,
            },
            src,
            dst,
            port: 1,
            start: self.cbr_start,
        };
        let v = &self.variants;
        let s = &self.tcp_starts;
        Ok(match self.experiment {
            Experiment::Congestion => vec![
                tcp(TCP_A, v[0], NodeId::N1, NodeId::N4, s[0]),
                cbr(NodeId::N2, NodeId::N3),
            ],
            Experiment::Fairness => vec![
                tcp(TCP_A, v[0], NodeId::N1, NodeId::N4, s[0]),
                tcp(TCP_B, v[1], NodeId::N5, NodeId::N6, s[1]),
                cbr(NodeId::N2, NodeId::N3),
            ],
            Experiment::Queueing => vec![
                tcp(TCP_A, v[0], NodeId::N1, NodeId::N4, s[0]),
                cbr(NodeId::N5, NodeId::N6),
            ],
        })
    }

    pub fn variant_label(&self) -> String {
        self.variants.iter().map(|v| v.as_str()).collect::<Vec<_>>().join("/")
    }

    /// Stable identifier, also used in output file names.
    pub fn id(&self) -> String {
        let vs = self.variants.iter().map(|v| v.as_str()).collect::<Vec<_>>().join("-");
        format!(
            "exp{}_{vs}_cbr{}_{}_s{}",
            self.experiment,
            self.cbr_mbps,
            self.queue.as_str(),
            self.seed
        )
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let starts = self.tcp_starts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
        vec![
            ("scenario", self.id()),
            ("experiment", self.experiment.to_string()),
            ("variants", self.variants.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(",")),
            ("cbr_mbps", self.cbr_mbps.to_string()),
            ("queue", self.queue.as_str().to_string()),
            ("scenario_seed", self.seed.to_string()),
            ("scenario_duration", self.duration.to_string()),
            ("scenario_cbr_start", self.cbr_start.to_string()),
            ("tcp_starts", starts),
        ]
    }
}
