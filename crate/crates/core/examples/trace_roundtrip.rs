//! Parse an NS-2 trace excerpt, report per-flow counts, and re-emit it.
//!
//!     cargo run --example trace_roundtrip [path/to/trace.tr]

use std::fs::File;
use std::io::BufReader;

use tcpsim::metrics::{drop_rate, Interval};
use tcpsim::trace::{read_trace, TraceEvent, TraceRecord};

const SAMPLE: &str = "\
+ 1.3500 0 2 tcp 1000 ------- 1 0.0 3.0 29 199
- 1.3500 0 2 tcp 1000 ------- 1 0.0 3.0 29 199
r 1.3556 3 2 ack 40 ------- 1 3.0 0.0 15 201
+ 1.3556 2 0 ack 40 ------- 1 3.0 0.0 15 201
- 1.3556 2 0 ack 40 ------- 1 3.0 0.0 15 201
r 1.35576 0 2 tcp 1000 ------- 1 0.0 3.0 29 199
+ 1.35576 2 3 tcp 1000 ------- 1 0.0 3.0 29 199
d 1.35576 2 3 tcp 1000 ------- 1 0.0 3.0 29 199
+ 1.356 1 2 cbr 1000 ------- 2 1.0 3.1 157 207
- 1.356 1 2 cbr 1000 ------- 2 1.0 3.1 157 207
";

fn main() -> tcpsim::Result<()> {
    let records: Vec<TraceRecord> = match std::env::args().nth(1) {
        Some(path) => read_trace(BufReader::new(File::open(path)?)).collect::<tcpsim::Result<_>>()?,
        None => read_trace(SAMPLE.as_bytes()).collect::<tcpsim::Result<_>>()?,
    };
    println!("{} records", records.len());

    let mut flows: Vec<u32> = records.iter().map(|r| r.fid).collect();
    flows.sort_unstable();
    flows.dedup();
    let end = records.iter().map(|r| r.time.as_secs_f64()).fold(0.0, f64::max) + 1e-9;
    let all = Interval::from_secs(0.0, end)?;
    for f in flows {
        let d = drop_rate(&records, f, all);
        println!("flow {f}: {} drops ({:.3} of sent)", d.count, d.fraction);
    }

    for r in records.iter().filter(|r| r.event == TraceEvent::Drop).take(5) {
        println!("dropped: {r}");
    }

    // emitting and re-parsing yields the same records
    let text: String = records.iter().map(|r| r.emit_line() + "\n").collect();
    let again: Vec<TraceRecord> = read_trace(text.as_bytes()).collect::<tcpsim::Result<_>>()?;
    assert_eq!(again, records);
    println!("round trip ok");
    Ok(())
}
