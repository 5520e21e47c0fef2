//! Seeded sampling of separable states.
//!
//! A sample is a convex mixture of `K` Haar-random pure product states with
//! flat-Dirichlet weights. Every sample index gets its own ChaCha stream, so
//! parallel batteries reproduce regardless of scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::density::{validate_state_matrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DimPair, C64};

pub const DEFAULT_SEED: u64 = 42;
pub const MAX_COMPONENTS: usize = 10;

/// Independent generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn haar_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

pub fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparableMixture {
    dims: DimPair,
    weights: Vec<f64>,
    factors: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl SeparableMixture {
    pub fn new(
        dims: DimPair,
        weights: Vec<f64>,
        factors: Vec<(ComplexMatrix, ComplexMatrix)>,
    ) -> Result<Self> {
        if weights.is_empty() || weights.len() != factors.len() {
            return Err(Error::InvalidState(format!(
                "{} weights for {} product factors",
                weights.len(),
                factors.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidState("negative mixture weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        let mut clean = Vec::with_capacity(factors.len());
        for (a, b) in &factors {
            if a.rows() != dims.d1() || b.rows() != dims.d2() {
                return Err(Error::mismatch(dims, format!("{}x{}", a.rows(), b.rows())));
            }
            clean.push((validate_state_matrix(a)?, validate_state_matrix(b)?));
        }
        Ok(SeparableMixture {
            dims,
            weights,
            factors: clean,
        })
    }

    pub fn dims(&self) -> DimPair {
        self.dims
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[(ComplexMatrix, ComplexMatrix)] {
        &self.factors
    }

    pub fn to_density(&self) -> DensityMatrix {
        let n = self.dims.total();
        let mut m = ComplexMatrix::zeros(n, n);
        for (w, (a, b)) in self.weights.iter().zip(&self.factors) {
            m = &m + &a.kron(b).scale(*w);
        }
        DensityMatrix::new(self.dims, m).expect("convex mixture of states is a state")
    }
}

pub fn sample_separable_with<R: Rng + ?Sized>(
    dims: DimPair,
    k: usize,
    rng: &mut R,
) -> Result<SeparableMixture> {
    if k == 0 {
        return Err(Error::InvalidState("mixture needs k >= 1 components".into()));
    }
    let weights = dirichlet_weights(k, rng);
    let factors = (0..k)
        .map(|_| {
            (
                ComplexMatrix::outer(&haar_ket(dims.d1(), rng)),
                ComplexMatrix::outer(&haar_ket(dims.d2(), rng)),
            )
        })
        .collect();
    SeparableMixture::new(dims, weights, factors)
}

pub fn sample_separable(dims: DimPair, k: usize, seed: u64) -> Result<SeparableMixture> {
    sample_separable_with(dims, k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Sample `index` of a seeded battery: `K` uniform on `1..=10`.
pub fn battery_sample(dims: DimPair, seed: u64, index: u64) -> DensityMatrix {
    let mut rng = sample_rng(seed, index);
    let k = rng.random_range(1..=MAX_COMPONENTS);
    sample_separable_with(dims, k, &mut rng)
        .expect("k >= 1")
        .to_density()
}

/// Matrix with independent standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `(G + G^dagger)/2` for a Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(n, n, rng).hermitian_part()
}

/// `G G^dagger / Tr(G G^dagger)`: a full-rank state, generally entangled.
pub fn random_state<R: Rng + ?Sized>(dims: DimPair, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dims.total(), dims.total(), rng);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(dims, m.scale(1.0 / t)).expect("Gram matrix is a valid state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ppt_classify, PptClass};

    #[test]
    fn single_component_is_product() {
        let m = sample_separable(DimPair::qubits(), 1, 7).unwrap();
        assert_eq!(m.weights(), &[1.0]);
        let rho = m.to_density();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
        // pure product: purity 1
        let purity = rho.matrix().trace_product(rho.matrix()).unwrap().re;
        assert!((purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_and_separable() {
        let a = sample_separable(DimPair::new(2, 3).unwrap(), 5, 3).unwrap();
        let b = sample_separable(DimPair::new(2, 3).unwrap(), 5, 3).unwrap();
        assert_eq!(a.to_density(), b.to_density());
        for i in 0..50 {
            let rho = battery_sample(DimPair::qutrits(), DEFAULT_SEED, i);
            assert_eq!(ppt_classify(&rho).class, PptClass::Ppt);
        }
    }

    #[test]
    fn streams_differ() {
        let x = battery_sample(DimPair::qubits(), 1, 0);
        let y = battery_sample(DimPair::qubits(), 1, 1);
        assert_ne!(x, y);
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        let p = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
        let d = DimPair::qubits();
        assert!(SeparableMixture::new(d, vec![0.5], vec![(p.clone(), p.clone())]).is_err());
        assert!(SeparableMixture::new(d, vec![], vec![]).is_err());
    }
}
