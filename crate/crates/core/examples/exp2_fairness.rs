//! Two TCP flows from different sources share the bottleneck with a CBR flow.
//!
//!     cargo run --release --example exp2_fairness

use tcpsim::experiment::{exp2_grid, sweep, FairnessRow, SimParams, DEFAULT_PAIRS};

fn main() -> tcpsim::Result<()> {
    let params = SimParams::default();
    let cells = sweep(exp2_grid(&DEFAULT_PAIRS, &[2.0, 6.0, 8.0, 10.0], &params), &params, None);
    println!("{:>15} {:>5} {:>8} {:>8} {:>7}", "pair", "cbr", "A Mbps", "B Mbps", "jain");
    for c in cells {
        let row = FairnessRow::new(&c.outcome?)?;
        println!(
            "{:>15} {:>5} {:>8.3} {:>8.3} {:>7}",
            format!("{}/{}", row.variant_a, row.variant_b),
            row.cbr_mbps,
            row.throughput_a,
            row.throughput_b,
            row.jain.map_or("-".into(), |j| format!("{j:.4}"))
        );
    }
    Ok(())
}
