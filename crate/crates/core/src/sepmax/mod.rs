//! Maximum of `Tr(W^2 rho)` over separable states.
//!
//! The objective is linear in `rho`, so the maximum over the separable set is
//! reached on a pure product state. The see-saw alternates exact top
//! eigenvector updates on each factor, starting from a deterministic Bloch
//! grid and from Haar-random kets.

mod cache;

pub use cache::{cache_key, SepMaxCache, SepMaxCacheEntry};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lambda_min, top_eigenpair, ComplexMatrix, DimPair, C64, HERMITIAN_TOL, ZERO};
use crate::states::{haar_ket, sample_rng, BlochVector, DEFAULT_SEED};

/// Value reported for `max Tr(W_c^2 rho_sep)` with the qutrit witness `wl_c`.
pub const WLC_REPORTED_MAX: f64 = 0.0401555;

const MONOTONE_SLACK: f64 = 1e-12;

/// `(2 - 2p + p^2)/4`, the separable maximum of `Tr((W_L^p)^2 rho)`.
pub fn closed_form_wlp(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            family: "wl_p".into(),
            name: "p".into(),
            value: p,
            range: "(0, 1]".into(),
        });
    }
    Ok((2.0 - 2.0 * p + p * p) / 4.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SeesawSettings {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    /// Resolution of the Bloch grid; `0` disables grid seeds.
    pub grid_resolution: usize,
}

impl Default for SeesawSettings {
    fn default() -> Self {
        SeesawSettings {
            restarts: 64,
            seed: DEFAULT_SEED,
            max_iter: 500,
            tol: 1e-12,
            grid_resolution: 6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SepMaxResult {
    pub dims: DimPair,
    pub max_value: f64,
    pub argmax_a: Vec<C64>,
    pub argmax_b: Vec<C64>,
    pub restarts_used: usize,
    pub grid_restarts: usize,
    /// Every restart stopped on the improvement tolerance before the cap.
    pub converged: bool,
    pub restart_values: Vec<f64>,
    /// Best objective among grid seed pairs before any refinement.
    pub best_seed_value: f64,
    pub monotone: bool,
    pub iterations: usize,
}

impl SepMaxResult {
    /// `|a><a| (x) |b><b|` at the maximizer.
    pub fn argmax_state(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.argmax_a).kron(&ComplexMatrix::outer(&self.argmax_b))
    }

    pub fn argmax_bloch(&self) -> Result<(BlochVector, BlochVector)> {
        Ok((
            BlochVector::direction_of_pure(&self.argmax_a)?,
            BlochVector::direction_of_pure(&self.argmax_b)?,
        ))
    }
}

#[derive(Clone, Debug)]
struct Run {
    value: f64,
    a: Vec<C64>,
    b: Vec<C64>,
    converged: bool,
    monotone: bool,
    iterations: usize,
}

/// `(<a| (x) I) M (|a> (x) I)`, a `d2 x d2` operator.
pub fn condition_on_a(m: &ComplexMatrix, dims: DimPair, a: &[C64]) -> ComplexMatrix {
    let (d1, d2) = (dims.d1(), dims.d2());
    ComplexMatrix::from_fn(d2, d2, |j, l| {
        let mut s = ZERO;
        for i in 0..d1 {
            for k in 0..d1 {
                s += a[i].conj() * m[(i * d2 + j, k * d2 + l)] * a[k];
            }
        }
        s
    })
}

/// `(I (x) <b|) M (I (x) |b>)`, a `d1 x d1` operator.
pub fn condition_on_b(m: &ComplexMatrix, dims: DimPair, b: &[C64]) -> ComplexMatrix {
    let (d1, d2) = (dims.d1(), dims.d2());
    ComplexMatrix::from_fn(d1, d1, |i, k| {
        let mut s = ZERO;
        for j in 0..d2 {
            for l in 0..d2 {
                s += b[j].conj() * m[(i * d2 + j, k * d2 + l)] * b[l];
            }
        }
        s
    })
}

fn qform(m: &ComplexMatrix, v: &[C64]) -> f64 {
    let mut s = ZERO;
    for (i, vi) in v.iter().enumerate() {
        for (k, vk) in v.iter().enumerate() {
            s += vi.conj() * m[(i, k)] * vk;
        }
    }
    s.re
}

/// `<a b| M |a b>` for a pure product state.
pub fn product_value(m: &ComplexMatrix, dims: DimPair, a: &[C64], b: &[C64]) -> f64 {
    qform(&condition_on_a(m, dims, a), b)
}

fn seesaw_from(m: &ComplexMatrix, dims: DimPair, a0: Vec<C64>, s: &SeesawSettings) -> Result<Run> {
    let mut a = a0;
    let (mut value, mut b) = top_eigenpair(&condition_on_a(m, dims, &a))?;
    let mut monotone = true;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < s.max_iter {
        iterations += 1;
        let (va, na) = top_eigenpair(&condition_on_b(m, dims, &b))?;
        let (vb, nb) = top_eigenpair(&condition_on_a(m, dims, &na))?;
        if va < value - MONOTONE_SLACK || vb < va - MONOTONE_SLACK {
            monotone = false;
        }
        let gain = vb - value;
        a = na;
        b = nb;
        value = value.max(vb);
        if gain < s.tol {
            converged = true;
            break;
        }
    }
    Ok(Run {
        value: product_value(m, dims, &a, &b),
        a,
        b,
        converged,
        monotone,
        iterations,
    })
}

fn sphere_ket(theta: f64, phi: f64) -> Vec<C64> {
    vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Pure-state kets on a coarse grid: an `r x r` polar/azimuth grid on the
/// qubit sphere, or for a qutrit an `r x r` grid of real amplitudes on the
/// positive octant combined with the four relative phases in `{0, pi/2}^2`.
pub fn grid_kets(d: usize, resolution: usize) -> Result<Vec<Vec<C64>>> {
    if resolution < 2 {
        return Err(Error::config("grid_resolution", "needs at least 2 points per axis"));
    }
    let r = resolution;
    let polar = |i: usize| std::f64::consts::PI * i as f64 / (r - 1) as f64;
    match d {
        2 => Ok((0..r)
            .flat_map(|i| {
                (0..r).map(move |j| {
                    sphere_ket(polar(i), 2.0 * std::f64::consts::PI * j as f64 / r as f64)
                })
            })
            .collect()),
        3 => {
            let half = std::f64::consts::FRAC_PI_2;
            let mut out = Vec::with_capacity(4 * r * r);
            for i in 0..r {
                for j in 0..r {
                    let (x, y) = (half * i as f64 / (r - 1) as f64, half * j as f64 / (r - 1) as f64);
                    for (p1, p2) in [(0.0, 0.0), (half, 0.0), (0.0, half), (half, half)] {
                        out.push(vec![
                            C64::new(x.cos(), 0.0),
                            C64::from_polar(x.sin() * y.cos(), p1),
                            C64::from_polar(x.sin() * y.sin(), p2),
                        ]);
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!("Bloch grid for d = {d}"))),
    }
}

/// Every pair of grid points on the two sides, as Bloch vectors.
pub fn bloch_grid_seed(dims: DimPair, resolution: usize) -> Result<Vec<(BlochVector, BlochVector)>> {
    let side = |d| -> Result<Vec<BlochVector>> {
        grid_kets(d, resolution)?
            .iter()
            .map(|k| BlochVector::direction_of_pure(k))
            .collect()
    };
    let a = side(dims.d1())?;
    let b = side(dims.d2())?;
    Ok(a.iter()
        .flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone())))
        .collect())
}

fn check_psd(m: &ComplexMatrix, dims: DimPair) -> Result<ComplexMatrix> {
    dims.check(m)?;
    let h = m.require_hermitian(HERMITIAN_TOL)?;
    let lmin = lambda_min(&h)?;
    if lmin < -1e-9 * h.max_abs().max(1.0) {
        return Err(Error::NotPositive { min_eigenvalue: lmin });
    }
    Ok(h)
}

/// Ranked grid seeds: the best `count` pairs, deduplicated by their `a` ket.
fn grid_starts(m: &ComplexMatrix, dims: DimPair, s: &SeesawSettings, count: usize) -> Result<(Vec<Vec<C64>>, f64)> {
    if s.grid_resolution == 0 || count == 0 {
        return Ok((Vec::new(), f64::NEG_INFINITY));
    }
    let ka = grid_kets(dims.d1(), s.grid_resolution)?;
    let kb = grid_kets(dims.d2(), s.grid_resolution)?;
    let mut scored: Vec<(f64, usize)> = ka
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let cond = condition_on_a(m, dims, a);
            let best = kb
                .iter()
                .map(|b| qform(&cond, b))
                .fold(f64::NEG_INFINITY, f64::max);
            (best, i)
        })
        .collect();
    let best_seed = scored.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    Ok((
        scored.iter().take(count).map(|&(_, i)| ka[i].clone()).collect(),
        best_seed,
    ))
}

/// See-saw maximization of `<a b| w_squared |a b>` over pure product states.
/// Half of the restarts (at most) start from the best grid seeds, the rest
/// from Haar-random kets drawn from per-restart streams of `seed`.
pub fn seesaw_max(w_squared: &ComplexMatrix, dims: DimPair, settings: &SeesawSettings) -> Result<SepMaxResult> {
    if settings.restarts == 0 {
        return Err(Error::config("restarts", "needs at least one restart"));
    }
    if settings.max_iter == 0 {
        return Err(Error::config("max_iter", "needs at least one iteration"));
    }
    let m = check_psd(w_squared, dims)?;
    let n_grid = if settings.grid_resolution == 0 { 0 } else { settings.restarts / 2 };
    let (mut starts, best_seed_value) = grid_starts(&m, dims, settings, n_grid)?;
    let grid_restarts = starts.len();
    for r in grid_restarts..settings.restarts {
        let mut rng = sample_rng(settings.seed, r as u64);
        starts.push(haar_ket(dims.d1(), &mut rng));
    }
    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|a| seesaw_from(&m, dims, a, settings))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let top = &runs[best];
    Ok(SepMaxResult {
        dims,
        max_value: top.value,
        argmax_a: top.a.clone(),
        argmax_b: top.b.clone(),
        restarts_used: runs.len(),
        grid_restarts,
        converged: runs.iter().all(|r| r.converged),
        restart_values: runs.iter().map(|r| r.value).collect(),
        best_seed_value,
        monotone: runs.iter().all(|r| r.monotone),
        iterations: runs.iter().map(|r| r.iterations).sum(),
    })
}

/// Exhaustive search over an `r x r` angle grid on both qubit spheres.
pub fn qubit_grid_search(m: &ComplexMatrix, resolution: usize) -> Result<f64> {
    let dims = DimPair::qubits();
    dims.check(m)?;
    let kets = grid_kets(2, resolution)?;
    Ok(kets
        .par_iter()
        .map(|a| {
            let cond = condition_on_a(m, dims, a);
            kets.iter()
                .map(|b| qform(&cond, b))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{wl_c, wl_p};

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_wlp(1.0).unwrap(), 0.25);
        assert_eq!(closed_form_wlp(0.5).unwrap(), 0.3125);
        assert!((closed_form_wlp(1e-12).unwrap() - 0.5).abs() < 1e-11);
        assert!(closed_form_wlp(0.0).is_err());
        assert!(closed_form_wlp(1.5).is_err());
    }

    #[test]
    fn seesaw_matches_closed_form() {
        let s = SeesawSettings { restarts: 16, ..Default::default() };
        for i in 1..=10 {
            let p = i as f64 / 10.0;
            let w = wl_p(p).unwrap();
            let r = seesaw_max(&w.squared(), w.dims(), &s).unwrap();
            assert!((r.max_value - closed_form_wlp(p).unwrap()).abs() < 1e-6, "p = {p}");
            assert!(r.monotone);
            let direct = product_value(&w.squared(), w.dims(), &r.argmax_a, &r.argmax_b);
            assert!((direct - r.max_value).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_gives_one() {
        let r = seesaw_max(&ComplexMatrix::identity(9), DimPair::qutrits(), &SeesawSettings::default()).unwrap();
        assert!((r.max_value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wl_c_maximum_sits_on_a_basis_product() {
        let w = wl_c();
        let r = seesaw_max(&w.squared(), w.dims(), &SeesawSettings::default()).unwrap();
        assert!((r.max_value - 81.0 / 1089.0).abs() < 1e-10);
        assert!(r.best_seed_value <= r.max_value + 1e-15);
    }

    #[test]
    fn rejects_indefinite_and_bad_settings() {
        let w = wl_p(0.5).unwrap();
        assert!(matches!(
            seesaw_max(w.matrix(), w.dims(), &SeesawSettings::default()),
            Err(Error::NotPositive { .. })
        ));
        let s = SeesawSettings { restarts: 0, ..Default::default() };
        assert!(seesaw_max(&w.squared(), w.dims(), &s).is_err());
    }

    #[test]
    fn grid_sizes_and_validity() {
        assert_eq!(bloch_grid_seed(DimPair::qubits(), 6).unwrap().len(), 36 * 36);
        assert_eq!(grid_kets(3, 4).unwrap().len(), 64);
        for (a, b) in bloch_grid_seed(DimPair::new(2, 3).unwrap(), 3).unwrap() {
            assert!((a.norm() - 1.0).abs() < 1e-12 && (b.norm() - 1.0).abs() < 1e-12);
        }
        assert!(grid_kets(2, 1).is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let w = wl_c();
        let s = SeesawSettings { restarts: 8, grid_resolution: 0, ..Default::default() };
        let a = seesaw_max(&w.squared(), w.dims(), &s).unwrap();
        let b = seesaw_max(&w.squared(), w.dims(), &s).unwrap();
        assert_eq!(a.restart_values, b.restart_values);
        assert_eq!(a.argmax_a, b.argmax_a);
    }
}
