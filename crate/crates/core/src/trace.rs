//! NS-2 style packet trace: one line per queue event, twelve space-separated
//! columns.
//!
//! ```text
//! event time from to type size flags fid src dst seq pkt_id
//! + 1.356 1 2 cbr 1000 ------- 2 1.0 3.1 157 207
//! ```
//!
//! `+` enqueue, `-` dequeue (transmission start), `r` received by the next
//! node, `d` dropped. Times are seconds, addresses are `node.port`,
//! sequence numbers count segments.

use std::fmt;
use std::io::{self, BufRead, BufWriter, Write};

use crate::error::{Error, Result};
use crate::net::{Addr, NodeId, Packet, PacketKind};
use crate::sim::SimTime;

const NO_FLAGS: &str = "-------";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceEvent {
    Enqueue,
    Dequeue,
    Receive,
    Drop,
}

impl TraceEvent {
    pub fn symbol(self) -> char {
        match self {
            TraceEvent::Enqueue => '+',
            TraceEvent::Dequeue => '-',
            TraceEvent::Receive => 'r',
            TraceEvent::Drop => 'd',
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "+" => Some(TraceEvent::Enqueue),
            "-" => Some(TraceEvent::Dequeue),
            "r" => Some(TraceEvent::Receive),
            "d" => Some(TraceEvent::Drop),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub event: TraceEvent,
    pub time: SimTime,
    pub from_node: u32,
    pub to_node: u32,
    pub pkt_type: PacketKind,
    pub pkt_size: u32,
    /// `None` renders as seven dashes.
    pub flags: Option<String>,
    pub fid: u32,
    pub src: Addr,
    pub dst: Addr,
    pub seq_num: u64,
    pub pkt_id: u64,
}

impl TraceRecord {
    pub fn for_packet(event: TraceEvent, time: SimTime, from: NodeId, to: NodeId, p: &Packet) -> Self {
        TraceRecord {
            event,
            time,
            from_node: from.index() as u32,
            to_node: to.index() as u32,
            pkt_type: p.kind,
            pkt_size: p.size,
            flags: None,
            fid: p.flow_id,
            src: p.src,
            dst: p.dst,
            seq_num: p.seq,
            pkt_id: p.uid,
        }
    }

    /// Renders the record as a trace line without the trailing newline.
    pub fn emit_line(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {} {} {} {} {} {} {}",
            self.event.symbol(),
            self.time,
            self.from_node,
            self.to_node,
            self.pkt_type,
            self.pkt_size,
            self.flags.as_deref().unwrap_or(NO_FLAGS),
            self.fid,
            self.src,
            self.dst,
            self.seq_num,
            self.pkt_id
        )
    }
}

fn field<T: std::str::FromStr>(raw: &str, line: usize, name: &'static str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        field: name,
        message: format!("cannot parse {raw:?}"),
    })
}

/// Parses one trace line. `line_no` is only used in error messages.
pub fn parse_line(line: &str, line_no: usize) -> Result<TraceRecord> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 12 {
        return Err(Error::Parse {
            line: line_no,
            field: "line",
            message: format!("expected 12 fields, found {}", fields.len()),
        });
    }
    let event = TraceEvent::from_symbol(fields[0]).ok_or_else(|| Error::Parse {
        line: line_no,
        field: "event",
        message: format!("unknown event {:?}", fields[0]),
    })?;
    let secs: f64 = field(fields[1], line_no, "time")?;
    let time = SimTime::from_secs_f64(secs).map_err(|e| Error::Parse {
        line: line_no,
        field: "time",
        message: e.to_string(),
    })?;
    let pkt_size: u32 = field(fields[5], line_no, "pkt size")?;
    if pkt_size == 0 {
        return Err(Error::Parse {
            line: line_no,
            field: "pkt size",
            message: "packet size must be positive".into(),
        });
    }
    let raw_flags = fields[6];
    if !raw_flags.chars().all(|c| c == '-' || c.is_ascii_alphabetic()) {
        return Err(Error::Parse {
            line: line_no,
            field: "flags",
            message: format!("unexpected flags {raw_flags:?}"),
        });
    }
    let flags = (!raw_flags.chars().all(|c| c == '-')).then(|| raw_flags.to_string());
    Ok(TraceRecord {
        event,
        time,
        from_node: field(fields[2], line_no, "from node")?,
        to_node: field(fields[3], line_no, "to node")?,
        pkt_type: field(fields[4], line_no, "pkt type")?,
        pkt_size,
        flags,
        fid: field(fields[7], line_no, "fid")?,
        src: field(fields[8], line_no, "src addr")?,
        dst: field(fields[9], line_no, "dst addr")?,
        seq_num: field(fields[10], line_no, "seq num")?,
        pkt_id: field(fields[11], line_no, "pkt id")?,
    })
}

/// Lazily parses a trace stream, skipping blank lines. Line numbers are 1-based.
pub fn read_trace<R: BufRead>(reader: R) -> impl Iterator<Item = Result<TraceRecord>> {
    let mut failed = false;
    reader
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| {
            if failed {
                return None;
            }
            let res = match line {
                Err(e) => Err(Error::Io(e)),
                Ok(l) if l.trim().is_empty() => return None,
                Ok(l) => parse_line(&l, i + 1),
            };
            failed = res.is_err();
            Some(res)
        })
}

/// Consumer of trace records as a simulation produces them.
pub trait TraceSink {
    fn record(&mut self, rec: &TraceRecord);
}

impl TraceSink for Vec<TraceRecord> {
    fn record(&mut self, rec: &TraceRecord) {
        self.push(rec.clone());
    }
}

/// Discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _: &TraceRecord) {}
}

/// Fans each record out to several sinks.
pub struct Tee<'a>(pub Vec<&'a mut dyn TraceSink>);

impl TraceSink for Tee<'_> {
    fn record(&mut self, rec: &TraceRecord) {
        for s in self.0.iter_mut() {
            s.record(rec);
        }
    }
}

/// Writes records as text lines. The first I/O error is kept and reported by
/// [`TraceWriter::finish`]; later records are discarded.
pub struct TraceWriter<W: Write> {
    out: BufWriter<W>,
    error: Option<io::Error>,
    lines: u64,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Self {
        TraceWriter {
            out: BufWriter::new(out),
            error: None,
            lines: 0,
        }
    }

    pub fn lines(&self) -> u64 {
        self.lines
    }

    pub fn finish(mut self) -> io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.into_inner().map_err(|e| e.into_error())
    }
}

impl<W: Write> TraceSink for TraceWriter<W> {
    fn record(&mut self, rec: &TraceRecord) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = writeln!(self.out, "{rec}") {
            self.error = Some(e);
        } else {
            self.lines += 1;
        }
    }
}
