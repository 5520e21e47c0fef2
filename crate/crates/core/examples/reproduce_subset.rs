//! Runs selected published-value checkpoints (default 2, 8 and 12) and
//! prints the pass/fail table.
//!
//!     cargo run --release --example reproduce_subset -- 1 6 9

use std::env;

use nlew::scan::{reproduce, ReproduceSettings};

fn main() {
    let mut only: Vec<u8> = env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if only.is_empty() {
        only = vec![2, 8, 12];
    }
    let report = reproduce(&ReproduceSettings { only, ..Default::default() });
    print!("{}", report.table());
}
