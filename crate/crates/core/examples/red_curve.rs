//! RED's early-drop probability against the average queue length: the
//! closed form next to a Monte Carlo estimate through the admission path.
//!
//!     cargo run --release --example red_curve

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcpsim::net::{RedParams, RedState, RedVerdict};

fn main() {
    let params = RedParams::default();
    let limit = 100;
    let draws = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    println!("{:>5} {:>9} {:>9}", "avg", "p_b", "observed");
    for tenth in (0..=200).step_by(10) {
        let avg = tenth as f64 / 10.0;
        let mut early = 0;
        for _ in 0..draws {
            // count pinned at 0: every draw sees the plain p_b
            let mut s = RedState {
                avg,
                ..RedState::default()
            };
            if s.admit(&params, 0, limit, rng.gen()) != RedVerdict::Admit {
                early += 1;
            }
        }
        let closed = if avg < params.min_th {
            0.0
        } else if avg >= params.max_th {
            1.0
        } else {
            params.drop_probability(avg, 0)
        };
        println!("{avg:>5.1} {closed:>9.5} {:>9.5}", early as f64 / draws as f64);
    }
}
