//! Pauli and Gell-Mann expansions, exported as CSV, with the recomputed
//! coefficients that disagree with published tables.

use std::io;

use nlew::decompose::{decompose, errata};
use nlew::witness::{wl_c, wl_p};

fn main() -> nlew::Result<()> {
    let w = wl_p(0.4)?;
    let sq = decompose(&w.squared(), w.dims())?;
    println!("(W_L^p)^2 at p = 0.4, nonzero terms:");
    for (a, b, c) in sq.nonzero(1e-12) {
        println!("  {a}{b}: {c:+.4}");
    }

    let c = decompose(wl_c().matrix(), wl_c().dims())?;
    println!("wl_c has {} nonzero terms; CSV:", c.nonzero(1e-12).len());
    c.write_csv(io::stdout().lock())?;

    for e in errata(0.4)? {
        println!("erratum {} {}{}: published {:+.4}, recomputed {:+.4}", e.table, e.basis_a, e.basis_b, e.reference, e.computed);
    }
    Ok(())
}
