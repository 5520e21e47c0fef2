//! Sampling certification of every registered linear witness.

use nlew::states::zoo_members;
use nlew::witness::{certify_witness, CertifySettings, ALL_WITNESSES};

fn main() -> nlew::Result<()> {
    let settings = CertifySettings { samples: 2000, seed: 42 };
    for f in ALL_WITNESSES {
        let params: Vec<f64> = if f.param_names().is_empty() { vec![] } else { vec![0.5] };
        let w = f.build(&params)?;
        let r = certify_witness(&w, &settings, &zoo_members(w.dims()));
        let hits: Vec<&str> = r.detected.iter().map(|d| d.label.as_str()).collect();
        println!(
            "{:<14} {} min over separable {:+.3e}, lambda_min {:+.4}, detects {:?}",
            f.id(),
            if r.passed() { "ok     " } else { "SUSPECT" },
            r.min_separable_value,
            r.lambda_min,
            hits
        );
    }
    Ok(())
}
