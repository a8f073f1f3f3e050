//! One TCP flow against a CBR flow of increasing rate, for each loss-based
//! variant and Vegas. Prints throughput, drop fraction and latency per cell.
//!
//!     cargo run --release --example exp1_sweep [rates]    # rates like 1:12:1

use tcpsim::experiment::{exp1_grid, parse_rates, sweep, SimParams, EXP1_VARIANTS, TCP_A};

fn main() -> tcpsim::Result<()> {
    let rates = parse_rates(&std::env::args().nth(1).unwrap_or_else(|| "1:12:1".into()))?;
    let params = SimParams::default();
    let cells = sweep(exp1_grid(&EXP1_VARIANTS, &rates, &params), &params, None);

    println!("{:>8} {:>5} {:>9} {:>7} {:>9}", "variant", "cbr", "Mbps", "drops", "latency");
    for c in &cells {
        let o = c.outcome.as_ref().map_err(|e| tcpsim::Error::Invariant(e.to_string()))?;
        let s = &o.flow(TCP_A).expect("tcp flow").stats;
        let lat = s.avg_latency.map_or("-".to_string(), |l| format!("{:.1}ms", l * 1e3));
        println!(
            "{:>8} {:>5} {:>9.3} {:>6.2}% {:>9}",
            c.scenario.variant_label(),
            c.scenario.cbr_mbps,
            s.throughput_mbps,
            s.drop_rate * 100.0,
            lat
        );
    }
    Ok(())
}
