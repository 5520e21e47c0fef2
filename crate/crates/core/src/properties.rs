//! Seeded property batteries: the matrix and determinant inequalities the
//! witness constructions rest on, separable positivity of every NLEW kind,
//! and the realignment/correlation trace-norm identity.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    correlation_matrix_canonical, determinant, lambda_max, lambda_min, real_determinant,
    realignment_trace_norm, reduction_operator_a, reduction_operator_b, trace_norm, ComplexMatrix,
    DimPair,
};
use crate::nlew::{evaluate, h2_term, NlewKind};
use crate::states::{battery_sample, ginibre, random_hermitian, random_state, sample_rng, DensityMatrix};
use crate::witness::{k_term, WitnessOperator};

pub const BATTERY_TOL: f64 = 1e-10;
pub const TRACE_NORM_TOL: f64 = 1e-9;

/// Dimension pairs cycled through by the state batteries.
pub const BATTERY_DIMS: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 3), (2, 4)];

#[derive(Clone, Debug, Serialize)]
pub struct BatteryOutcome {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest amount by which an inequality was exceeded (negative when
    /// every sample satisfied it with room to spare).
    pub worst_excess: f64,
    /// Samples on which the quantity is undefined.
    pub skipped: usize,
}

impl BatteryOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn run(name: &str, samples: usize, tol: f64, f: impl Fn(usize) -> f64 + Sync + Send) -> BatteryOutcome {
    let excess: Vec<f64> = (0..samples).into_par_iter().map(f).collect();
    BatteryOutcome {
        name: name.to_string(),
        samples,
        violations: excess.iter().filter(|&&e| e > tol).count(),
        worst_excess: excess.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        skipped: 0,
    }
}

fn dims_for(i: usize) -> DimPair {
    let (a, b) = BATTERY_DIMS[i % BATTERY_DIMS.len()];
    DimPair::new(a, b).expect("static dims")
}

fn gram<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    &g * &g.adjoint()
}

/// `lambda_min(A) Tr B <= Tr(AB) <= lambda_max(A) Tr B` for Hermitian `A`, PSD `B`.
pub fn result1(samples: usize, seed: u64) -> BatteryOutcome {
    run("lambda bounds on Tr(AB)", samples, BATTERY_TOL, |i| {
        let mut rng = sample_rng(seed ^ 0x01, i as u64);
        let n = 2 + i % 8;
        let a = random_hermitian(n, &mut rng);
        let b = gram(n, &mut rng);
        let tb = b.trace().re;
        let tab = a.trace_product(&b).expect("square").re;
        let lo = lambda_min(&a).expect("Hermitian") * tb - tab;
        let hi = tab - lambda_max(&a).expect("Hermitian") * tb;
        lo.max(hi)
    })
}

/// `det(I + Tr_A rho) <= det(I + rho)` and the same with `Tr_B`, on separable samples.
pub fn result2(samples: usize, seed: u64) -> BatteryOutcome {
    run("determinant bounds", samples, BATTERY_TOL, |i| {
        let rho = battery_sample(dims_for(i), seed, i as u64);
        let k = k_term(&rho);
        let n = rho.dims().d1();
        let mb = &ComplexMatrix::identity(n) + &rho.marginal_a();
        let kb = real_determinant(&mb).expect("square") - k.det_full;
        k.value.max(kb)
    })
}

/// `Tr_B rho (x) I - rho >= 0` and `I (x) Tr_A rho - rho >= 0` on separable samples.
pub fn result3(samples: usize, seed: u64) -> BatteryOutcome {
    run("reduction operators PSD", samples, BATTERY_TOL, |i| {
        let rho = battery_sample(dims_for(i), seed, i as u64);
        let a = reduction_operator_a(rho.matrix(), rho.dims()).expect("dims");
        let b = reduction_operator_b(rho.matrix(), rho.dims()).expect("dims");
        -(lambda_min(&a).expect("Hermitian").min(lambda_min(&b).expect("Hermitian")))
    })
}

/// `(det(Tr_A rho)/d1)^d1 >= det(rho)` on full-rank random states.
pub fn result4(samples: usize, seed: u64) -> BatteryOutcome {
    run("marginal determinant bound", samples, BATTERY_TOL, |i| {
        let mut rng = sample_rng(seed ^ 0x04, i as u64);
        let rho = random_state(dims_for(i), &mut rng);
        h2_term(&rho).0
    })
}

/// Eigenvalues of `AB` for PSD `A`, `B` are nonnegative, checked through the
/// power sums `Tr((AB)^k)`, `k = 1..n`, and `det(AB)`, each of which is a
/// nonnegative real number exactly when that holds for the spectrum's moments.
pub fn result5(samples: usize, seed: u64) -> BatteryOutcome {
    run("spectrum of AB nonnegative", samples, BATTERY_TOL, |i| {
        let mut rng = sample_rng(seed ^ 0x05, i as u64);
        let n = 2 + i % 5;
        let a = gram(n, &mut rng);
        let b = gram(n, &mut rng);
        let a = a.scale(1.0 / a.trace().re);
        let b = b.scale(1.0 / b.trace().re);
        let ab = &a * &b;
        let mut p = ab.clone();
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..n {
            let t = p.trace();
            worst = worst.max(-t.re).max(t.im.abs() - BATTERY_TOL);
            p = &p * &ab;
        }
        let d = determinant(&ab).expect("square");
        worst.max(-d.re).max(d.im.abs() - BATTERY_TOL)
    })
}

/// `|Tr A| <= ||A||_1` on complex Gaussian matrices.
pub fn result6(samples: usize, seed: u64) -> BatteryOutcome {
    run("trace bounded by trace norm", samples, BATTERY_TOL, |i| {
        let mut rng = sample_rng(seed ^ 0x06, i as u64);
        let n = 2 + i % 8;
        let a = ginibre(n, n, &mut rng);
        a.trace().norm() - trace_norm(&a)
    })
}

pub fn inequality_batteries(samples: usize, seed: u64) -> Vec<BatteryOutcome> {
    vec![
        result1(samples, seed),
        result2(samples, seed),
        result3(samples, seed),
        result4(samples, seed),
        result5(samples, seed),
        result6(samples, seed),
    ]
}

/// `-Tr(W_NL rho)` over separable samples of `dims`. Linear correlation
/// witnesses that come out negative definite detect nothing and are skipped,
/// as are states where a construction is undefined.
pub fn nlew_positivity(
    kind: NlewKind,
    w: Option<&WitnessOperator>,
    dims: DimPair,
    sep_max: Option<f64>,
    samples: usize,
    seed: u64,
) -> Result<BatteryOutcome> {
    let name = match w {
        Some(w) if w.params().is_empty() => format!("{kind} on separable states with {}", w.family()),
        Some(w) => {
            let ps: Vec<String> = w.params().iter().map(|p| p.to_string()).collect();
            format!("{kind} on separable states with {}({})", w.family(), ps.join(", "))
        }
        None => format!("{kind} on separable {dims} states"),
    };
    let values: Vec<Result<Option<f64>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let rho = battery_sample(dims, seed, i as u64);
            match evaluate(kind, w, &rho, sep_max) {
                Ok(e) if kind.is_linear() && e.intermediates.lambda_max_w.is_some_and(|l| l <= 0.0) => {
                    Ok(None)
                }
                Ok(e) => Ok(Some(-e.value)),
                Err(Error::Undefined(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let values = values.into_iter().collect::<Result<Vec<Option<f64>>>>()?;
    let excess: Vec<f64> = values.iter().flatten().copied().collect();
    Ok(BatteryOutcome {
        name,
        samples,
        violations: excess.iter().filter(|&&e| e > BATTERY_TOL).count(),
        worst_excess: excess.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        skipped: samples - excess.len(),
    })
}

/// `| ||R(rho)||_1 - ||C(rho)||_1 |` on random states.
pub fn trace_norm_identity(dims: DimPair, samples: usize, seed: u64) -> BatteryOutcome {
    run(&format!("realignment vs correlation trace norm {dims}"), samples, TRACE_NORM_TOL, |i| {
        let mut rng = sample_rng(seed ^ 0x0c, i as u64);
        let rho: DensityMatrix = random_state(dims, &mut rng);
        let r = realignment_trace_norm(rho.matrix(), dims).expect("dims");
        let c = correlation_matrix_canonical(rho.matrix(), dims).expect("dims").trace_norm();
        (r - c).abs()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batteries_pass() {
        for b in inequality_batteries(64, 3) {
            assert!(b.passed(), "{b:?}");
        }
        for d in [(2, 2), (2, 3), (3, 3)] {
            let b = trace_norm_identity(DimPair::new(d.0, d.1).unwrap(), 32, 3);
            assert!(b.passed(), "{b:?}");
        }
    }

    #[test]
    fn entangled_states_can_break_result2() {
        let phi = crate::states::make_family_state(crate::states::StateFamily::PhiPlus, &[]).unwrap();
        assert!(k_term(&phi).value > 0.0);
    }
}
