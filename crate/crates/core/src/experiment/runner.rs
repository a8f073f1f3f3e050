use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{jain_index, Metric, TimeSeriesBuilder};
use crate::net::QueueKind;
use crate::sim::SimTime;
use crate::tcp::TcpVariant;
use crate::trace::{NullSink, Tee, TraceSink, TraceWriter};

use super::{simulate, RunOutcome, Scenario, SimParams, CBR, TCP_A};

/// Variant pairs compared in experiment 2 by default.
pub const DEFAULT_PAIRS: [(TcpVariant, TcpVariant); 4] = [
    (TcpVariant::Reno, TcpVariant::Reno),
    (TcpVariant::NewReno, TcpVariant::Reno),
    (TcpVariant::Vegas, TcpVariant::Vegas),
    (TcpVariant::NewReno, TcpVariant::Vegas),
];

pub const EXP1_VARIANTS: [TcpVariant; 4] = [TcpVariant::Tahoe, TcpVariant::Reno, TcpVariant::NewReno, TcpVariant::Vegas];

/// Parses `a:b:step` (inclusive) or a comma-separated list of rates in Mbps.
pub fn parse_rates(s: &str) -> Result<Vec<f64>> {
    let num = |x: &str| -> Result<f64> {
        x.trim()
            .parse::<f64>()
            .map_err(|e| Error::invalid(format!("bad rate {x:?}: {e}")))
    };
    let rates = if let Some((a, rest)) = s.split_once(':') {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || b < a {
            return Err(Error::invalid(format!("rate range {s:?} needs a <= b and step > 0")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        // rounded so that 0.1 steps print as 0.3 rather than 0.30000000000000004
        (0..=n).map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if rates.is_empty() || rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::invalid(format!("rates must be positive, got {s:?}")));
    }
    Ok(rates)
}

pub fn exp1_grid(variants: &[TcpVariant], rates: &[f64], params: &SimParams) -> Vec<Scenario> {
    variants
        .iter()
        .flat_map(|&v| rates.iter().map(move |&r| Scenario::exp1(v, r, params)))
        .collect()
}

pub fn exp2_grid(pairs: &[(TcpVariant, TcpVariant)], rates: &[f64], params: &SimParams) -> Vec<Scenario> {
    pairs
        .iter()
        .flat_map(|&p| rates.iter().map(move |&r| Scenario::exp2(p, r, params)))
        .collect()
}

/// Runs one scenario without keeping a trace.
pub fn run(scenario: &Scenario, params: &SimParams) -> Result<RunOutcome> {
    simulate(scenario, params, &mut NullSink)
}

pub fn trace_path(dir: &Path, scenario: &Scenario) -> PathBuf {
    dir.join(format!("{}.tr", scenario.id()))
}

/// Runs one scenario, writing its trace to `path`.
pub fn run_traced(scenario: &Scenario, params: &SimParams, path: &Path) -> Result<RunOutcome> {
    let mut w = TraceWriter::new(BufWriter::new(File::create(path)?));
    let outcome = simulate(scenario, params, &mut w)?;
    w.finish()?;
    Ok(outcome)
}

/// One cell of a sweep and its result. A failed cell does not stop the others.
#[derive(Debug)]
pub struct Cell {
    pub scenario: Scenario,
    pub outcome: Result<RunOutcome>,
}

/// Runs every scenario in parallel. Results come back in input order and
/// are identical to running each scenario alone.
pub fn sweep(scenarios: Vec<Scenario>, params: &SimParams, trace_dir: Option<&Path>) -> Vec<Cell> {
    scenarios
        .into_par_iter()
        .map(|scenario| {
            let outcome = match trace_dir {
                Some(dir) => run_traced(&scenario, params, &trace_path(dir, &scenario)),
                None => run(&scenario, params),
            };
            Cell { scenario, outcome }
        })
        .collect()
}

/// Experiment 3 result: the run itself plus bucketed series.
#[derive(Debug, Clone)]
pub struct QueueingRun {
    pub outcome: RunOutcome,
    pub bucket_starts: Vec<f64>,
    pub tcp_throughput: Vec<f64>,
    pub cbr_throughput: Vec<f64>,
    pub tcp_latency: Vec<Option<f64>>,
}

impl QueueingRun {
    /// Jain index of TCP and CBR throughput over the measurement window.
    pub fn jain(&self) -> Result<f64> {
        let th = |id| {
            self.outcome
                .flow(id)
                .map(|f| f.stats.throughput_mbps)
                .ok_or_else(|| Error::Invariant(format!("flow {id} missing")))
        };
        jain_index(&[th(TCP_A)?, th(CBR)?])
    }

    /// Mean per-packet TCP latency over the measurement window.
    pub fn tcp_latency_mean(&self) -> Option<f64> {
        self.outcome.flow(TCP_A).and_then(|f| f.stats.avg_latency)
    }
}

pub fn run_exp3(
    variant: TcpVariant,
    queue: QueueKind,
    params: &SimParams,
    trace: Option<&mut dyn TraceSink>,
) -> Result<QueueingRun> {
    let scenario = Scenario::exp3(variant, queue, params);
    let end = SimTime::from_secs_f64(scenario.duration)?;
    let mut tcp = TimeSeriesBuilder::new(TCP_A, params.bucket, end)?;
    let mut cbr = TimeSeriesBuilder::new(CBR, params.bucket, end)?;
    let mut null = NullSink;
    let trace = trace.unwrap_or(&mut null);
    let outcome = simulate(&scenario, params, &mut Tee(vec![&mut tcp, &mut cbr, trace]))?;
    let values = |b: &TimeSeriesBuilder| -> Vec<f64> {
        b.series(Metric::Throughput).iter().map(|p| p.value.unwrap_or(0.0)).collect()
    };
    Ok(QueueingRun {
        outcome,
        bucket_starts: tcp.series(Metric::Throughput).iter().map(|p| p.bucket_start).collect(),
        tcp_throughput: values(&tcp),
        cbr_throughput: values(&cbr),
        tcp_latency: tcp.series(Metric::Latency).iter().map(|p| p.value).collect(),
    })
}
