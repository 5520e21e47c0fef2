//! Sweeps a family from a JSON configuration (default: the isotropic
//! qubit cell) and prints the refined detection intervals.
//!
//!     cargo run --release --example detect_sweep -- examples/configs/detect_isotropic.json

use std::env;

use nlew::scan::{run_sweep, SweepConfig};

fn main() -> nlew::Result<()> {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/detect_isotropic.json").into());
    let sweep = SweepConfig::load(&path)?.resolve()?;
    let report = run_sweep(&sweep)?;
    let s = &report.summary;
    println!("{} over {:?}: {} points, {} flagged", s.family, s.params, s.grid_points, s.flagged_rows);
    for d in &s.detections {
        for iv in &d.union {
            println!("  {} {}: union [{:.5}, {:.5}] verified {}", d.kind, d.param, iv.lo, iv.hi, iv.verified);
        }
        for (lo, hi) in &d.common {
            println!("  {} {}: every line [{lo:.5}, {hi:.5}]", d.kind, d.param);
        }
    }
    if let Some(m) = s.min_tr_wl {
        println!("  min Tr(W_L rho) = {m:+.5}");
    }
    Ok(())
}
