use nlew::linalg::DimPair;
use nlew::states::{family_registry, make_family_state, ppt_classify, sample_separable, StateFamily};

fn main() -> nlew::Result<()> {
    for spec in family_registry() {
        let ranges: Vec<String> = spec.params.iter().map(|r| r.describe()).collect();
        println!("{:<16} {}  [{}]", spec.id, spec.dims, ranges.join(", "));
    }

    // The Horodecki family crosses from separable to PPT entangled to NPT.
    for g in [2.5, 3.5, 4.5] {
        let rho = make_family_state(StateFamily::HorodeckiGamma, &[g])?;
        let ppt = ppt_classify(&rho);
        println!("gamma = {g}: {} (min PT eigenvalue {:+.4})", ppt.class, ppt.min_pt_eigenvalue);
    }

    let mix = sample_separable(DimPair::qutrits(), 4, 7)?;
    let rho = mix.to_density();
    println!(
        "separable 3x3 sample with weights {:?}: {}",
        mix.weights(),
        ppt_classify(&rho).class
    );
    Ok(())
}
