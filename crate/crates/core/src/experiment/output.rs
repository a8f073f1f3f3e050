use std::collections::BTreeSet;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{fairness, FlowStats};

use super::{Experiment, FlowReport, QueueingRun, RunOutcome, SimParams, TCP_A, TCP_B};

/// One metrics CSV row: a flow of a scenario over its measurement window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario: String,
    pub variant: String,
    pub cbr_mbps: f64,
    pub queue_kind: String,
    pub flow_id: u32,
    pub throughput_mbps: f64,
    /// Empty in the CSV when nothing was delivered.
    pub latency_s: Option<f64>,
    pub drop_fraction: f64,
    pub drop_count: u64,
}

impl MetricsRow {
    /// `variant` is the flow's own label, or the pair label for experiment 2
    /// so that rows of one pair stay together.
    pub fn new(outcome: &RunOutcome, flow: &FlowReport) -> Self {
        let s = &outcome.scenario;
        let variant = match (s.experiment, flow.spec.is_tcp()) {
            (Experiment::Fairness, true) => s.variant_label(),
            _ => flow.spec.label().to_string(),
        };
        MetricsRow::from_stats(&s.id(), &variant, s.cbr_mbps, s.queue.as_str(), &flow.stats)
    }

    pub fn from_stats(scenario: &str, variant: &str, cbr_mbps: f64, queue_kind: &str, st: &FlowStats) -> Self {
        MetricsRow {
            scenario: scenario.to_string(),
            variant: variant.to_string(),
            cbr_mbps,
            queue_kind: queue_kind.to_string(),
            flow_id: st.flow_id,
            throughput_mbps: st.throughput_mbps,
            latency_s: st.avg_latency,
            drop_fraction: st.drop_rate,
            drop_count: st.dropped_packets,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessRow {
    pub scenario: String,
    pub variant_a: String,
    pub variant_b: String,
    pub cbr_mbps: f64,
    pub throughput_a: f64,
    pub throughput_b: f64,
    pub ratio: Option<f64>,
    pub jain: Option<f64>,
}

impl FairnessRow {
    pub fn new(outcome: &RunOutcome) -> Result<Self> {
        let s = &outcome.scenario;
        if s.experiment != Experiment::Fairness {
            return Err(Error::invalid("fairness rows need an experiment 2 run"));
        }
        let th = |id| {
            outcome
                .flow(id)
                .map(|f| f.stats.throughput_mbps)
                .ok_or_else(|| Error::Invariant(format!("flow {id} missing")))
        };
        let (a, b) = (th(TCP_A)?, th(TCP_B)?);
        // both flows starved is a legitimate outcome; leave the index empty
        let f = fairness(a, b).ok();
        Ok(FairnessRow {
            scenario: s.id(),
            variant_a: s.variants[0].as_str().to_string(),
            variant_b: s.variants[1].as_str().to_string(),
            cbr_mbps: s.cbr_mbps,
            throughput_a: a,
            throughput_b: b,
            ratio: f.and_then(|f| f.ratio),
            jain: f.map(|f| f.jain),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueingRow {
    pub scenario: String,
    pub variant: String,
    pub queue_kind: String,
    pub tcp_throughput_mbps: f64,
    pub cbr_throughput_mbps: f64,
    pub jain: Option<f64>,
    pub tcp_latency_s: Option<f64>,
}

impl QueueingRow {
    pub fn new(run: &QueueingRun) -> Self {
        let o = &run.outcome;
        let th = |id| o.flow(id).map(|f| f.stats.throughput_mbps).unwrap_or(0.0);
        QueueingRow {
            scenario: o.scenario.id(),
            variant: o.scenario.variant_label(),
            queue_kind: o.scenario.queue.as_str().to_string(),
            tcp_throughput_mbps: th(TCP_A),
            cbr_throughput_mbps: th(super::CBR),
            jain: run.jain().ok(),
            tcp_latency_s: run.tcp_latency_mean(),
        }
    }
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Whitespace-separated columns with a `#` comment header, as read by gnuplot.
/// Missing values are written as `NaN`, which gnuplot skips.
#[derive(Debug, Clone, PartialEq)]
pub struct DatTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl DatTable {
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "# {}", self.columns.join(" "))?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| v.map_or_else(|| "NaN".to_string(), |x| x.to_string()))
                .collect();
            writeln!(out, "{}", cells.join(" "))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        fs::write(path, buf)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMetric {
    Throughput,
    DropRate,
    Latency,
}

impl RowMetric {
    pub const ALL: [RowMetric; 3] = [RowMetric::Throughput, RowMetric::DropRate, RowMetric::Latency];

    /// Output file stem.
    pub fn name(self) -> &'static str {
        match self {
            RowMetric::Throughput => "throughput",
            RowMetric::DropRate => "droprate",
            RowMetric::Latency => "latency",
        }
    }

    fn unit(self) -> &'static str {
        match self {
            RowMetric::Throughput => "Mbps",
            RowMetric::DropRate => "fraction of sent packets",
            RowMetric::Latency => "seconds",
        }
    }

    fn value(self, r: &MetricsRow) -> Option<f64> {
        match self {
            RowMetric::Throughput => Some(r.throughput_mbps),
            RowMetric::DropRate => Some(r.drop_fraction),
            RowMetric::Latency => r.latency_s,
        }
    }
}

/// Pivots metrics rows into one column per series against the CBR rate.
/// A series is a variant label, extended with the flow id and queue kind
/// when the rows contain more than one of those.
pub fn pivot(rows: &[MetricsRow], metric: RowMetric) -> DatTable {
    let flows: BTreeSet<u32> = rows.iter().map(|r| r.flow_id).collect();
    let queues: BTreeSet<&str> = rows.iter().map(|r| r.queue_kind.as_str()).collect();
    let key = |r: &MetricsRow| {
        let mut k = r.variant.clone();
        if queues.len() > 1 {
            k = format!("{k}@{}", r.queue_kind);
        }
        if flows.len() > 1 {
            k = format!("{k}#{}", r.flow_id);
        }
        k
    };
    let mut series: Vec<String> = Vec::new();
    for r in rows {
        let k = key(r);
        if !series.contains(&k) {
            series.push(k);
        }
    }
    let mut rates: Vec<f64> = rows.iter().map(|r| r.cbr_mbps).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    let table_rows = rates
        .iter()
        .map(|&rate| {
            let mut row = vec![Some(rate)];
            row.extend(series.iter().map(|s| {
                rows.iter()
                    .find(|r| r.cbr_mbps == rate && &key(r) == s)
                    .and_then(|r| metric.value(r))
            }));
            row
        })
        .collect();
    let mut columns = vec!["cbr_mbps".to_string()];
    columns.extend(series);
    DatTable {
        comments: vec![format!("{} ({}) against CBR rate", metric.name(), metric.unit())],
        columns,
        rows: table_rows,
    }
}

pub fn fairness_table(rows: &[FairnessRow]) -> DatTable {
    let mut pairs: Vec<String> = Vec::new();
    for r in rows {
        let k = format!("{}/{}", r.variant_a, r.variant_b);
        if !pairs.contains(&k) {
            pairs.push(k);
        }
    }
    let mut rates: Vec<f64> = rows.iter().map(|r| r.cbr_mbps).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    let table_rows = rates
        .iter()
        .map(|&rate| {
            let mut row = vec![Some(rate)];
            row.extend(pairs.iter().map(|p| {
                rows.iter()
                    .find(|r| r.cbr_mbps == rate && &format!("{}/{}", r.variant_a, r.variant_b) == p)
                    .and_then(|r| r.jain)
            }));
            row
        })
        .collect();
    let mut columns = vec!["cbr_mbps".to_string()];
    columns.extend(pairs);
    DatTable {
        comments: vec!["Jain fairness index of the two TCP flows against CBR rate".into()],
        columns,
        rows: table_rows,
    }
}

pub fn series_table(run: &QueueingRun) -> DatTable {
    let s = &run.outcome.scenario;
    let rows = run
        .bucket_starts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            vec![
                Some(t),
                Some(run.tcp_throughput[i]),
                Some(run.cbr_throughput[i]),
                run.tcp_latency[i],
            ]
        })
        .collect();
    DatTable {
        comments: vec![
            format!("{} over time, {} queue, CBR from {} s", s.variant_label(), s.queue, s.cbr_start),
            "throughput in Mbps, latency in seconds".into(),
        ],
        columns: ["time", "tcp_throughput", "cbr_throughput", "tcp_latency"]
            .map(String::from)
            .to_vec(),
        rows,
    }
}

/// `key = value` metadata: every effective parameter plus `extra` entries.
pub fn write_meta(path: &Path, params: &SimParams, extra: &[(String, String)]) -> Result<()> {
    let mut out = Vec::new();
    params.write_kv(&mut out)?;
    writeln!(out, "rng = ChaCha8 seeded from seed")?;
    for (k, v) in extra {
        writeln!(out, "{k} = {v}")?;
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(variant: &str, flow_id: u32, cbr: f64, th: f64, lat: Option<f64>) -> MetricsRow {
        MetricsRow {
            scenario: format!("s_{variant}_{cbr}"),
            variant: variant.into(),
            cbr_mbps: cbr,
            queue_kind: "droptail".into(),
            flow_id,
            throughput_mbps: th,
            latency_s: lat,
            drop_fraction: 0.0,
            drop_count: 0,
        }
    }

    #[test]
    fn csv_round_trip_keeps_missing_latency() {
        let rows = vec![row("reno", 1, 1.0, 2.5, Some(0.03)), row("vegas", 1, 12.0, 0.0, None)];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "scenario,variant,cbr_mbps,queue_kind,flow_id,throughput_mbps,latency_s,drop_fraction,drop_count\n"
        ));
        assert!(text.contains("vegas,12.0,droptail,1,0.0,,0.0,0"));
        let back: Vec<MetricsRow> = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn pivot_one_column_per_variant() {
        let rows = vec![
            row("tahoe", 1, 1.0, 2.0, Some(0.1)),
            row("reno", 1, 1.0, 2.1, None),
            row("tahoe", 1, 2.0, 1.0, Some(0.2)),
            row("reno", 1, 2.0, 1.1, Some(0.3)),
        ];
        let t = pivot(&rows, RowMetric::Latency);
        assert_eq!(t.columns, vec!["cbr_mbps", "tahoe", "reno"]);
        assert_eq!(t.rows[0], vec![Some(1.0), Some(0.1), None]);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# cbr_mbps tahoe reno\n1 0.1 NaN\n2 0.2 0.3\n"));
    }

    #[test]
    fn pivot_splits_flows() {
        let rows = vec![row("reno/reno", 1, 1.0, 2.0, None), row("reno/reno", 2, 1.0, 2.1, None)];
        let t = pivot(&rows, RowMetric::Throughput);
        assert_eq!(t.columns, vec!["cbr_mbps", "reno/reno#1", "reno/reno#2"]);
    }
}
