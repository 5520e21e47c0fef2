//! Every nonlinear construction on a state it detects, with the logged
//! intermediates and the self-audit.

use nlew::nlew::{evaluate, NlewKind};
use nlew::states::{make_family_state, StateFamily};
use nlew::witness::{wl_c, wl_p, WitnessFamily};

fn main() -> nlew::Result<()> {
    let cases = [
        (NlewKind::FBasic, Some(WitnessFamily::PsiMinus.build(&[])?), StateFamily::RhoEnt, vec![], None),
        (NlewKind::Wnl1, Some(wl_p(0.5)?), StateFamily::PhiPlus, vec![], None),
        (NlewKind::Wnl2, Some(wl_p(0.005)?), StateFamily::RhoA, vec![0.95], None),
        (NlewKind::Wnl3, Some(WitnessFamily::Phi2x4.build(&[])?), StateFamily::RhoB, vec![0.5], None),
        (NlewKind::Wnl4, Some(wl_c()), StateFamily::RhoX, vec![3.0], Some(0.0401555)),
        (NlewKind::CcnrNl, None, StateFamily::Rho1, vec![], None),
        (NlewKind::DvL, None, StateFamily::RhoBeta, vec![0.76], None),
    ];
    for (kind, w, family, params, sep_max) in cases {
        let rho = make_family_state(family, &params)?;
        let e = evaluate(kind, w.as_ref(), &rho, sep_max)?;
        e.audit()?;
        println!("{kind:<8} on {family:?}{params:?}: {:+.6}  detects {}", e.value, e.detects());
        println!("         {}", e.intermediates.digest());
    }
    Ok(())
}
