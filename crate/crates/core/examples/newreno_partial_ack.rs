//! Two segments lost from one window. Reno leaves fast recovery on the first
//! partial ACK and has to halve again; NewReno retransmits the second hole
//! immediately and stays in recovery.
//!
//!     cargo run --example newreno_partial_ack

use tcpsim::tcp::loopback::{run_loopback, LoopbackConfig};
use tcpsim::tcp::{TcpConfig, TcpVariant};

fn main() -> tcpsim::Result<()> {
    let cfg = LoopbackConfig {
        drop_first_tx: [5, 7].into_iter().collect(),
        ..LoopbackConfig::default()
    };
    let tcp = TcpConfig {
        rcv_wnd: 64,
        initial_cwnd: 10.0,
        ..TcpConfig::default()
    };
    for v in [TcpVariant::Reno, TcpVariant::NewReno, TcpVariant::Sack] {
        let r = run_loopback(v, tcp, &cfg)?;
        println!("{v}: ssthresh history {:?}, timeouts {}", r.ssthresh_history, r.sender.stats().timeouts);
        for a in r.acks.iter().filter(|a| (5..=26).contains(&a.ack)).take(30) {
            println!(
                "  t={:.4} ack {:>3} {:?} cwnd {:.2} ssthresh {}",
                a.at.as_secs_f64(),
                a.ack,
                a.phase,
                a.cwnd,
                a.ssthresh
            );
        }
    }
    Ok(())
}
