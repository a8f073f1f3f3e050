//! Packet-level simulation of TCP congestion control variants (Tahoe, Reno,
//! NewReno, Vegas, SACK) sharing a dumbbell bottleneck with constant bit
//! rate cross traffic, under DropTail or RED queueing.
//!
//! Runs produce NS-2 format traces; [`metrics`] turns traces into
//! throughput, drop rate, latency and fairness figures, and [`experiment`]
//! wires up the three standard scenarios and their parameter sweeps.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod net;
pub mod sim;
pub mod tcp;
pub mod trace;

pub use error::{Error, Result};
