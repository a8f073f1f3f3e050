//! DropTail against RED on the bottleneck, with the CBR flow joining after
//! the TCP flow has settled. Prints a coarse time series and window summary.
//!
//!     cargo run --release --example exp3_queueing

use tcpsim::experiment::{run_exp3, SimParams};
use tcpsim::net::QueueKind;
use tcpsim::tcp::TcpVariant;

fn main() -> tcpsim::Result<()> {
    let params = SimParams {
        bucket: 2.0,
        ..SimParams::default()
    };
    for v in [TcpVariant::Reno, TcpVariant::Sack] {
        for q in [QueueKind::DropTail, QueueKind::Red] {
            let run = run_exp3(v, q, &params, None)?;
            println!("{v} over {q}:");
            for (i, t) in run.bucket_starts.iter().enumerate() {
                let lat = run.tcp_latency[i].map_or("-".into(), |l| format!("{:.1}ms", l * 1e3));
                println!(
                    "  t={t:>4}  tcp {:>6.3}  cbr {:>6.3}  latency {lat}",
                    run.tcp_throughput[i], run.cbr_throughput[i]
                );
            }
            println!(
                "  after CBR onset: jain {:.4}, mean tcp latency {:.1}ms",
                run.jain()?,
                run.tcp_latency_mean().unwrap_or(f64::NAN) * 1e3
            );
        }
    }
    Ok(())
}
