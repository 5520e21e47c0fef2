use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{gell_mann_generators, hermitian_spectrum, ComplexMatrix, C64};

/// Real coefficients `b` of `(1/d)(I + b . lambda)` for a qubit (`d = 2`, Pauli)
/// or qutrit (`d = 3`, Gell-Mann). Coefficients follow the basis order of
/// [`crate::linalg::gell_mann_generators`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BlochVector {
    dim: usize,
    coeffs: Vec<f64>,
}

const NORM_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

fn local_matrix(dim: usize, coeffs: &[f64]) -> ComplexMatrix {
    let gens = gell_mann_generators(dim).expect("dim is 2 or 3");
    let mut m = gens[0].clone();
    for (b, g) in coeffs.iter().zip(&gens[1..]) {
        m = &m + &g.scale(*b);
    }
    m.scale(1.0 / dim as f64)
}

impl BlochVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let dim = match coeffs.len() {
            3 => 2,
            8 => 3,
            n => {
                return Err(Error::InvalidState(format!(
                    "Bloch vector needs 3 (qubit) or 8 (qutrit) coefficients, got {n}"
                )))
            }
        };
        if coeffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("non-finite Bloch coefficient".into()));
        }
        let norm2: f64 = coeffs.iter().map(|x| x * x).sum();
        if norm2 > 1.0 + NORM_TOL {
            return Err(Error::InvalidState(format!(
                "Bloch vector norm^2 {norm2} exceeds 1"
            )));
        }
        if dim == 3 {
            let min_eigenvalue = hermitian_spectrum(&local_matrix(3, &coeffs))?.lambda_min();
            if min_eigenvalue < -PSD_TOL {
                return Err(Error::NotPositive { min_eigenvalue });
            }
        }
        Ok(BlochVector { dim, coeffs })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim * dim - 1])
    }

    /// Unit-norm Bloch direction of a pure qubit or qutrit state. For a qubit
    /// this is the pure state itself; for a qutrit the result is the mixed
    /// state on the `|b| = 1` sphere whose top eigenvector is `psi`.
    pub fn direction_of_pure(psi: &[C64]) -> Result<Self> {
        let d = psi.len();
        if d != 2 && d != 3 {
            return Err(Error::Unsupported(format!("Bloch vectors for d = {d}")));
        }
        let rho = ComplexMatrix::outer(psi);
        let gens = gell_mann_generators(d)?;
        let mut b: Vec<f64> = gens[1..]
            .iter()
            .map(|g| rho.trace_product(g).map(|z| z.re * d as f64 / 2.0))
            .collect::<Result<_>>()?;
        let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= f64::EPSILON {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        b.iter_mut().for_each(|x| *x /= norm);
        Self::new(b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        local_matrix(self.dim, &self.coeffs)
    }
}

impl TryFrom<Vec<f64>> for BlochVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        BlochVector::new(v)
    }
}

impl From<BlochVector> for Vec<f64> {
    fn from(b: BlochVector) -> Self {
        b.coeffs
    }
}

pub fn product_state_from_bloch(a: &BlochVector, b: &BlochVector) -> Result<DensityMatrix> {
    DensityMatrix::product(&a.to_matrix(), &b.to_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vectors_give_maximally_mixed() {
        let a = BlochVector::zero(2).unwrap();
        let b = BlochVector::zero(3).unwrap();
        let rho = product_state_from_bloch(&a, &b).unwrap();
        assert!(rho
            .matrix()
            .approx_eq(&ComplexMatrix::identity(6).scale(1.0 / 6.0), 1e-15));
    }

    #[test]
    fn north_poles_give_ground_state() {
        let z = BlochVector::new(vec![0.0, 0.0, 1.0]).unwrap();
        let rho = product_state_from_bloch(&z, &z).unwrap();
        let mut e = ComplexMatrix::zeros(4, 4);
        e[(0, 0)] = C64::new(1.0, 0.0);
        assert!(rho.matrix().approx_eq(&e, 1e-15));
    }

    #[test]
    fn qutrit_ball_is_a_strict_subset_of_unit_ball() {
        let mut plus = vec![0.0; 8];
        plus[7] = 1.0;
        let err = BlochVector::new(plus).unwrap_err();
        match err {
            Error::NotPositive { min_eigenvalue } => {
                assert!((min_eigenvalue - (1.0 - 2.0 / 3f64.sqrt()) / 3.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        let mut minus = vec![0.0; 8];
        minus[7] = -1.0;
        assert!(BlochVector::new(minus).is_ok());
    }

    #[test]
    fn rejects_long_vectors() {
        assert!(BlochVector::new(vec![1.0, 1.0, 0.0]).is_err());
        assert!(BlochVector::new(vec![0.0; 4]).is_err());
    }

    #[test]
    fn pure_direction_keeps_top_eigenvector() {
        let s = 1.0 / 3f64.sqrt();
        let psi = vec![C64::new(s, 0.0), C64::new(0.0, s), C64::new(-s, 0.0)];
        let b = BlochVector::direction_of_pure(&psi).unwrap();
        assert!((b.norm() - 1.0).abs() < 1e-12);
        let (_, top) = crate::linalg::top_eigenpair(&b.to_matrix()).unwrap();
        let overlap: C64 = top.iter().zip(&psi).map(|(a, p)| a.conj() * p).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }
}
