//! Prints the final-state table for `r = 0..=9` on one lattice size.
//!
//! `cargo run --release -p volperc --example final_state -- 128 200`

use volperc::job::{run_ensemble, stats_table, StatsRow};
use volperc::ModelParams;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer argument"));
    let side = args.next().unwrap_or(64) as usize;
    let runs = args.next().unwrap_or(100);
    let rows: Vec<StatsRow> = (0..=9)
        .map(|r| {
            let ens = run_ensemble(&ModelParams::new(side, r).with_seed(1), 0, runs);
            StatsRow::from_stats(side, r, &ens.stats)
        })
        .collect();
    print!("{}", stats_table(&rows));
}
