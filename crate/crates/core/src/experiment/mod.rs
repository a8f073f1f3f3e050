//! Scenario construction for the three experiments, the simulation event
//! loop, parameter sweeps and output writers.

mod output;
mod params;
mod runner;
mod scenario;
mod world;

pub use output::*;
pub use params::SimParams;
pub use runner::*;
pub use scenario::{Experiment, FlowKind, FlowSpec, Scenario, CBR, TCP_A, TCP_B};
pub use world::{measurement_interval, simulate, FlowReport, FlowTotals, RunOutcome};
