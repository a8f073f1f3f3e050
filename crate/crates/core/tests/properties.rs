use proptest::prelude::*;

use tcpsim::experiment::{run, simulate, sweep, Scenario, SimParams, CBR, TCP_A, TCP_B};
use tcpsim::metrics::{flow_stats, jain_index, time_series, Metric};
use tcpsim::net::{Addr, PacketKind, QueueKind};
use tcpsim::sim::SimTime;
use tcpsim::tcp::TcpVariant;
use tcpsim::trace::{parse_line, TraceEvent, TraceRecord};

fn event() -> impl Strategy<Value = TraceEvent> {
    prop_oneof![
        Just(TraceEvent::Enqueue),
        Just(TraceEvent::Dequeue),
        Just(TraceEvent::Receive),
        Just(TraceEvent::Drop),
    ]
}

fn kind() -> impl Strategy<Value = PacketKind> {
    prop_oneof![Just(PacketKind::Tcp), Just(PacketKind::Ack), Just(PacketKind::Cbr)]
}

fn addr() -> impl Strategy<Value = Addr> {
    (0u32..64, 0u32..16).prop_map(|(node, port)| Addr { node, port })
}

prop_compose! {
    fn record()(
        event in event(),
        nanos in 0u64..1_000_000_000_000,
        from_node in 0u32..64,
        to_node in 0u32..64,
        pkt_type in kind(),
        pkt_size in 1u32..100_000,
        // all-dash strings are the same as no flags, so keep one letter in
        flags in proptest::option::of("[-]{0,3}[A-Z][-]{0,3}"),
        fid in 0u32..1000,
        src in addr(),
        dst in addr(),
        seq_num in any::<u64>(),
        pkt_id in any::<u64>(),
    ) -> TraceRecord {
        TraceRecord {
            event,
            time: SimTime::from_nanos(nanos),
            from_node,
            to_node,
            pkt_type,
            pkt_size,
            flags,
            fid,
            src,
            dst,
            seq_num,
            pkt_id,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn emit_then_parse_is_identity(r in record()) {
        let line = r.emit_line();
        prop_assert_eq!(parse_line(&line, 1).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jain_is_bounded(xs in proptest::collection::vec(0.0f64..100.0, 1..12)) {
        prop_assume!(xs.iter().any(|&x| x > 0.0));
        let j = jain_index(&xs).unwrap();
        prop_assert!(j >= 1.0 / xs.len() as f64 - 1e-12 && j <= 1.0 + 1e-12);
    }
}

fn short() -> SimParams {
    SimParams {
        duration: 8.0,
        warmup: 1.0,
        ..SimParams::default()
    }
}

#[test]
fn live_counters_match_trace_metrics() {
    let p = short();
    for s in [
        Scenario::exp1(TcpVariant::Reno, 11.0, &p),
        Scenario::exp2((TcpVariant::NewReno, TcpVariant::Vegas), 9.0, &p),
        Scenario::exp3(TcpVariant::Sack, QueueKind::Red, &p),
    ] {
        let mut records: Vec<TraceRecord> = Vec::new();
        let o = simulate(&s, &p, &mut records).unwrap();
        for f in &o.flows {
            let replay = flow_stats(&records, f.spec.flow_id, o.interval);
            assert_eq!(replay, f.stats, "{} flow {}", s.id(), f.spec.flow_id);
        }
    }
}

#[test]
fn series_buckets_add_up_to_the_window() {
    let p = short();
    let s = Scenario::exp1(TcpVariant::NewReno, 6.0, &p);
    let mut records: Vec<TraceRecord> = Vec::new();
    let o = simulate(&s, &p, &mut records).unwrap();
    let series = time_series(&records, TCP_A, Metric::Throughput, 1.0).unwrap();
    let whole: f64 = series
        .iter()
        .filter(|b| b.bucket_start >= 1.0)
        .map(|b| b.value.unwrap_or(0.0))
        .sum::<f64>()
        / 7.0;
    let live = o.flow(TCP_A).unwrap().stats.throughput_mbps;
    assert!((whole - live).abs() < 1e-9, "{whole} vs {live}");
}

#[test]
fn sweep_cells_match_standalone_runs() {
    let p = short();
    let grid = vec![
        Scenario::exp1(TcpVariant::Tahoe, 3.0, &p),
        Scenario::exp1(TcpVariant::Vegas, 10.0, &p),
        Scenario::exp2((TcpVariant::Reno, TcpVariant::Reno), 7.0, &p),
    ];
    let cells = sweep(grid.clone(), &p, None);
    for (s, c) in grid.iter().zip(&cells) {
        assert_eq!(&c.scenario, s);
        let alone = run(s, &p).unwrap();
        let swept = c.outcome.as_ref().unwrap();
        for id in [TCP_A, TCP_B, CBR] {
            assert_eq!(alone.flow(id).map(|f| &f.stats), swept.flow(id).map(|f| &f.stats));
        }
    }
}

#[test]
fn seed_changes_red_runs() {
    let p = short();
    let s = Scenario::exp3(TcpVariant::Reno, QueueKind::Red, &p);
    let a = run(&s, &p).unwrap();
    let q = SimParams { seed: 99, ..short() };
    let b = run(&Scenario::exp3(TcpVariant::Reno, QueueKind::Red, &q), &q).unwrap();
    assert_ne!(a.flow(TCP_A).unwrap().stats, b.flow(TCP_A).unwrap().stats);
}
