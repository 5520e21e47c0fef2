use nlew::sepmax::{closed_form_wlp, seesaw_max, SeesawSettings, WLC_REPORTED_MAX};
use nlew::witness::{wl_c, wl_p};

fn main() -> nlew::Result<()> {
    let settings = SeesawSettings::default();
    for p in [0.2, 0.5, 0.8] {
        let w = wl_p(p)?;
        let r = seesaw_max(&w.squared(), w.dims(), &settings)?;
        println!("wl_p({p}): see-saw {:.9}, closed form {:.9}", r.max_value, closed_form_wlp(p)?);
    }

    let w = wl_c();
    let r = seesaw_max(&w.squared(), w.dims(), &settings)?;
    let (a, b) = r.argmax_bloch()?;
    println!(
        "wl_c: see-saw {:.7} (81/1089 = {:.7}, reported {WLC_REPORTED_MAX})",
        r.max_value,
        81.0 / 1089.0
    );
    println!("  {} restarts ({} grid seeds), converged {}", r.restarts_used, r.grid_restarts, r.converged);
    println!("  maximizer Bloch directions {:?} / {:?}", a.coeffs(), b.coeffs());
    Ok(())
}
