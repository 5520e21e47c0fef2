use nlew::linalg::DimPair;
use nlew::nlew::NlewKind;
use nlew::properties::{inequality_batteries, nlew_positivity, trace_norm_identity};
use nlew::witness::wl_p;

fn main() -> nlew::Result<()> {
    for b in inequality_batteries(500, 1) {
        println!("{:<32} violations {}  worst excess {:+.2e}", b.name, b.violations, b.worst_excess);
    }
    let w = wl_p(0.5)?;
    for kind in [NlewKind::Wnl1, NlewKind::Wnl2, NlewKind::Wnl3] {
        let b = nlew_positivity(kind, Some(&w), w.dims(), None, 2000, 1)?;
        println!("{:<32} violations {}", b.name, b.violations);
    }
    let b = trace_norm_identity(DimPair::qutrits(), 200, 1);
    println!("{:<32} worst {:.1e}", b.name, b.worst_excess);
    Ok(())
}
