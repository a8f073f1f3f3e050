//! Command-line front end. `main.rs` only parses arguments and maps errors
//! to exit codes.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{
    exp1_grid, exp2_grid, parse_rates, pivot, read_csv, run_exp3, run_traced, series_table, sweep, write_csv,
    write_meta, Cell, Experiment, FairnessRow, MetricsRow, QueueingRow, RowMetric, Scenario, SimParams, DEFAULT_PAIRS,
    EXP1_VARIANTS,
};
use crate::metrics::{FlowStatsBuilder, Interval, Metric, TimeSeriesBuilder};
use crate::net::QueueKind;
use crate::sim::SimTime;
use crate::tcp::TcpVariant;
use crate::trace::{read_trace, TraceRecord, TraceWriter};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "tcpsim", version, about = "TCP congestion control experiments on a simulated dumbbell network")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its trace, metrics and metadata.
    Run(RunArgs),
    /// Run an experiment 1 or 2 grid over CBR rates.
    Sweep(SweepArgs),
    /// Run experiment 3 and write per-bucket time series.
    Exp3(Exp3Args),
    /// Compute flow statistics from an existing trace file.
    Analyze(AnalyzeArgs),
    /// Turn a metrics CSV into gnuplot data files.
    Plotdata(PlotdataArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` file overriding defaults; flags override the file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulated seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Time-series bucket width in seconds.
    #[arg(long)]
    pub bucket: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

impl Common {
    fn params(&self) -> Result<SimParams> {
        let mut p = SimParams::default();
        if let Some(path) = &self.config {
            p.apply_config(BufReader::new(File::open(path)?))?;
        }
        if let Some(s) = self.seed {
            p.seed = s;
        }
        if let Some(d) = self.duration {
            p.duration = d;
        }
        if let Some(b) = self.bucket {
            p.bucket = b;
        }
        p.validate()?;
        Ok(p)
    }

    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(&self.out_dir)
    }
}

/// Two variants separated by `,` or `:`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair(pub TcpVariant, pub TcpVariant);

impl FromStr for Pair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once([',', ':'])
            .ok_or_else(|| Error::invalid(format!("expected a pair like newreno,reno, got {s:?}")))?;
        Ok(Pair(a.parse()?, b.parse()?))
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "1")]
    pub experiment: Experiment,
    /// TCP variant for experiments 1 and 3.
    #[arg(long)]
    pub variant: Option<TcpVariant>,
    /// TCP variants for experiment 2, e.g. `newreno,vegas`.
    #[arg(long)]
    pub pair: Option<Pair>,
    /// CBR rate in Mbps.
    #[arg(long)]
    pub cbr: Option<f64>,
    /// Bottleneck queue discipline.
    #[arg(long)]
    pub queue: Option<QueueKind>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "1")]
    pub experiment: Experiment,
    /// Experiment 1 variants.
    #[arg(long, alias = "variants", value_delimiter = ',')]
    pub variant: Vec<TcpVariant>,
    /// Experiment 2 pairs; repeat the flag for several.
    #[arg(long, alias = "pairs")]
    pub pair: Vec<Pair>,
    /// Rates in Mbps as `a:b:step` or a comma list.
    #[arg(long, default_value = "1:12:1")]
    pub cbr: String,
    /// Also write a trace file per run.
    #[arg(long)]
    pub traces: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Exp3Args {
    #[arg(long, alias = "variants", value_delimiter = ',', default_value = "reno,sack")]
    pub variant: Vec<TcpVariant>,
    #[arg(long, value_delimiter = ',', default_value = "droptail,red")]
    pub queue: Vec<QueueKind>,
    /// CBR rate in Mbps.
    #[arg(long)]
    pub cbr: Option<f64>,
    /// CBR start time in seconds.
    #[arg(long)]
    pub cbr_start: Option<f64>,
    #[arg(long)]
    pub traces: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub trace: PathBuf,
    /// Flow ids to report; all data flows in the trace by default.
    #[arg(long)]
    pub flow: Vec<u32>,
    /// Window start in seconds.
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Window end in seconds; just past the last record by default.
    #[arg(long)]
    pub to: Option<f64>,
    /// Print a per-bucket series instead of whole-window statistics.
    #[arg(long)]
    pub bucket: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// Metrics CSV as written by `run` or `sweep`.
    pub csv: PathBuf,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Exp3(a) => cmd_exp3(a),
        Command::Analyze(a) => cmd_analyze(a, &mut io::stdout().lock()),
        Command::Plotdata(a) => cmd_plotdata(a),
    }
}

pub fn exit_code(e: &Error) -> u8 {
    if e.is_invariant() {
        EXIT_INVARIANT
    } else {
        match e {
            Error::InvalidInput(_) | Error::Config(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

fn scenario_entries(s: &Scenario) -> Vec<(String, String)> {
    s.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn save_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_csv(rows, File::create(path)?)
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let p = a.common.params()?;
    let scenario = match a.experiment {
        Experiment::Fairness => {
            if a.variant.is_some() {
                return Err(Error::Config("experiment 2 takes --pair, not --variant".into()));
            }
            let Pair(x, y) = a.pair.unwrap_or(Pair(TcpVariant::Reno, TcpVariant::Reno));
            Scenario::exp2((x, y), a.cbr.unwrap_or(5.0), &p)
        }
        e => {
            if a.pair.is_some() {
                return Err(Error::Config(format!("experiment {e} takes --variant, not --pair")));
            }
            let v = a.variant.unwrap_or(TcpVariant::Reno);
            if e == Experiment::Congestion {
                Scenario::exp1(v, a.cbr.unwrap_or(5.0), &p)
            } else {
                let mut s = Scenario::exp3(v, QueueKind::DropTail, &p);
                if let Some(c) = a.cbr {
                    s.cbr_mbps = c;
                }
                s
            }
        }
    };
    let scenario = Scenario {
        queue: a.queue.unwrap_or(scenario.queue),
        ..scenario
    };
    let dir = a.common.out_dir()?;
    let outcome = run_traced(&scenario, &p, &dir.join("trace.tr"))?;
    let rows: Vec<MetricsRow> = outcome.flows.iter().map(|f| MetricsRow::new(&outcome, f)).collect();
    save_csv(&dir.join("metrics.csv"), &rows)?;
    let mut extra = scenario_entries(&scenario);
    extra.push(("measurement_start".into(), outcome.interval.start.to_string()));
    extra.push(("measurement_end".into(), outcome.interval.end.to_string()));
    write_meta(&dir.join("meta"), &p, &extra)?;
    write_csv(&rows, io::stdout().lock())
}

fn report_failures(cells: &[Cell], extra: &mut Vec<(String, String)>) -> Result<()> {
    let mut first: Option<Error> = None;
    for c in cells {
        if let Err(e) = &c.outcome {
            eprintln!("cell {} failed: {e}", c.scenario.id());
            extra.push((format!("failed.{}", c.scenario.id()), e.to_string()));
            if first.is_none() || e.is_invariant() {
                first = Some(Error::Invariant(format!("sweep cell {} failed: {e}", c.scenario.id())));
            }
        }
    }
    match first {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let p = a.common.params()?;
    let rates = parse_rates(&a.cbr)?;
    let dir = a.common.out_dir()?.to_path_buf();
    let trace_dir = a.traces.then_some(dir.as_path());
    let mut extra = vec![
        ("experiment".to_string(), a.experiment.to_string()),
        ("cbr_rates".to_string(), rates.iter().map(f64::to_string).collect::<Vec<_>>().join(",")),
        ("measurement_start".to_string(), p.warmup.to_string()),
    ];
    let cells = match a.experiment {
        Experiment::Congestion => {
            if !a.pair.is_empty() {
                return Err(Error::Config("experiment 1 takes --variant, not --pair".into()));
            }
            let variants = if a.variant.is_empty() { EXP1_VARIANTS.to_vec() } else { a.variant };
            extra.push((
                "variants".into(),
                variants.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(","),
            ));
            sweep(exp1_grid(&variants, &rates, &p), &p, trace_dir)
        }
        Experiment::Fairness => {
            if !a.variant.is_empty() {
                return Err(Error::Config("experiment 2 takes --pair, not --variant".into()));
            }
            let pairs: Vec<_> = if a.pair.is_empty() {
                DEFAULT_PAIRS.to_vec()
            } else {
                a.pair.iter().map(|p| (p.0, p.1)).collect()
            };
            extra.push((
                "pairs".into(),
                pairs
                    .iter()
                    .map(|(x, y)| format!("{x}/{y}"))
                    .collect::<Vec<_>>()
                    .join(","),
            ));
            sweep(exp2_grid(&pairs, &rates, &p), &p, trace_dir)
        }
        Experiment::Queueing => return Err(Error::Config("use the exp3 subcommand for experiment 3".into())),
    };

    let ok: Vec<_> = cells.iter().filter_map(|c| c.outcome.as_ref().ok()).collect();
    let rows: Vec<MetricsRow> = ok
        .iter()
        .flat_map(|o| o.tcp_flows().map(|f| MetricsRow::new(o, f)))
        .collect();
    save_csv(&dir.join("metrics.csv"), &rows)?;
    for m in RowMetric::ALL {
        pivot(&rows, m).save(&dir.join(format!("{}.dat", m.name())))?;
    }
    if a.experiment == Experiment::Fairness {
        let fair = ok.iter().map(|o| FairnessRow::new(o)).collect::<Result<Vec<_>>>()?;
        save_csv(&dir.join("fairness.csv"), &fair)?;
        crate::experiment::fairness_table(&fair).save(&dir.join("fairness.dat"))?;
    }
    let failed = report_failures(&cells, &mut extra);
    write_meta(&dir.join("meta"), &p, &extra)?;
    eprintln!("{} of {} runs written to {}", ok.len(), cells.len(), dir.display());
    failed
}

fn cmd_exp3(a: Exp3Args) -> Result<()> {
    let mut p = a.common.params()?;
    if let Some(c) = a.cbr {
        p.exp3_cbr_mbps = c;
    }
    if let Some(s) = a.cbr_start {
        p.exp3_cbr_start = s;
    }
    p.validate()?;
    let dir = a.common.out_dir()?;
    let mut summary = Vec::new();
    let mut rows = Vec::new();
    for &v in &a.variant {
        for &q in &a.queue {
            let run = if a.traces {
                let s = Scenario::exp3(v, q, &p);
                let mut w = TraceWriter::new(io::BufWriter::new(File::create(dir.join(format!("{}.tr", s.id())))?));
                let run = run_exp3(v, q, &p, Some(&mut w))?;
                w.finish()?;
                run
            } else {
                run_exp3(v, q, &p, None)?
            };
            series_table(&run).save(&dir.join(format!("exp3_{}_{}.dat", v, q)))?;
            rows.extend(run.outcome.flows.iter().map(|f| MetricsRow::new(&run.outcome, f)));
            summary.push(QueueingRow::new(&run));
        }
    }
    save_csv(&dir.join("metrics.csv"), &rows)?;
    save_csv(&dir.join("summary.csv"), &summary)?;
    write_meta(
        &dir.join("meta"),
        &p,
        &[
            ("experiment".into(), "3".into()),
            ("variants".into(), a.variant.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(",")),
            ("queues".into(), a.queue.iter().map(|q| q.as_str()).collect::<Vec<_>>().join(",")),
            ("measurement_start".into(), p.exp3_cbr_start.to_string()),
        ],
    )?;
    write_csv(&summary, io::stdout().lock())
}

#[derive(Debug, Serialize)]
struct AnalyzeRow {
    flow_id: u32,
    sent: u64,
    received: u64,
    dropped: u64,
    throughput_mbps: f64,
    latency_s: Option<f64>,
    drop_fraction: f64,
    drop_count: u64,
}

#[derive(Debug, Serialize)]
struct SeriesRow {
    flow_id: u32,
    bucket_start: f64,
    throughput_mbps: Option<f64>,
    latency_s: Option<f64>,
}

pub fn cmd_analyze<W: Write>(a: AnalyzeArgs, out: &mut W) -> Result<()> {
    let records: Vec<TraceRecord> =
        read_trace(BufReader::new(File::open(&a.trace)?)).collect::<Result<Vec<_>>>()?;
    let last = records.iter().map(|r| r.time).max().unwrap_or(SimTime::ZERO);
    let end = match a.to {
        Some(t) => SimTime::from_secs_f64(t)?,
        None => SimTime::from_nanos(last.as_nanos() + 1),
    };
    let flows: Vec<u32> = if a.flow.is_empty() {
        let mut f: Vec<u32> = records.iter().filter(|r| r.pkt_type.is_data()).map(|r| r.fid).collect();
        f.sort_unstable();
        f.dedup();
        f
    } else {
        a.flow.clone()
    };
    if let Some(width) = a.bucket {
        let mut rows = Vec::new();
        for &id in &flows {
            let mut b = TimeSeriesBuilder::new(id, width, end)?;
            records.iter().for_each(|r| b.observe(r));
            let th = b.series(Metric::Throughput);
            let lat = b.series(Metric::Latency);
            rows.extend(th.iter().zip(&lat).map(|(t, l)| SeriesRow {
                flow_id: id,
                bucket_start: t.bucket_start,
                throughput_mbps: t.value,
                latency_s: l.value,
            }));
        }
        return write_csv(&rows, out);
    }
    let interval = Interval::new(SimTime::from_secs_f64(a.from)?, end)?;
    let rows: Vec<AnalyzeRow> = flows
        .iter()
        .map(|&id| {
            let mut b = FlowStatsBuilder::new(id, interval);
            records.iter().for_each(|r| b.observe(r));
            let s = b.finish();
            AnalyzeRow {
                flow_id: id,
                sent: s.sent_packets,
                received: s.received_packets,
                dropped: s.dropped_packets,
                throughput_mbps: s.throughput_mbps,
                latency_s: s.avg_latency,
                drop_fraction: s.drop_rate,
                drop_count: s.dropped_packets,
            }
        })
        .collect();
    write_csv(&rows, out)
}

fn cmd_plotdata(a: PlotdataArgs) -> Result<()> {
    let rows: Vec<MetricsRow> = read_csv(File::open(&a.csv)?)?;
    if rows.is_empty() {
        return Err(Error::invalid(format!("{} has no rows", a.csv.display())));
    }
    fs::create_dir_all(&a.out_dir)?;
    for m in RowMetric::ALL {
        let path = a.out_dir.join(format!("{}.dat", m.name()));
        pivot(&rows, m).save(&path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
