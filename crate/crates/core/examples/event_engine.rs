//! The bare scheduler: events fire in time order, ties in scheduling order,
//! and cancelled events never fire.
//!
//!     cargo run --example event_engine

use std::time::Duration;

use tcpsim::sim::{Scheduler, SimTime};

#[derive(Debug)]
enum Ev {
    Ping(u32),
    Timer,
}

fn main() -> tcpsim::Result<()> {
    let mut s = Scheduler::new();
    s.schedule(Duration::from_millis(5), Ev::Ping(2));
    s.schedule(Duration::from_millis(1), Ev::Ping(1));
    s.schedule(Duration::from_millis(5), Ev::Ping(3));
    let timer = s.schedule(Duration::from_millis(3), Ev::Timer);
    s.cancel(timer);

    let stats = s.run_until(SimTime::from_secs_f64(1.0)?, |s, ev| {
        println!("{} {ev:?}", s.now());
        if let Ev::Ping(n) = ev {
            if n < 6 {
                s.schedule(Duration::from_millis(100), Ev::Ping(n + 3));
            }
        }
        Ok(())
    })?;
    println!("{} events, clock at {}", stats.events_processed, stats.final_time);
    Ok(())
}
