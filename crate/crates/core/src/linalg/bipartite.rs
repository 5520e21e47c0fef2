//! Partial trace, partial transpose and realignment on `d1 x d2` systems.
//!
//! Composite indices are `(i, j) -> i * d2 + j` with `i` on A and `j` on B.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct DimPair {
    d1: usize,
    d2: usize,
}

impl DimPair {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        for d in [d1, d2] {
            if d < 2 {
                return Err(Error::InvalidDimension(d));
            }
        }
        Ok(DimPair { d1, d2 })
    }

    pub const fn qubits() -> Self {
        DimPair { d1: 2, d2: 2 }
    }

    pub const fn qutrits() -> Self {
        DimPair { d1: 3, d2: 3 }
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn is_symmetric(&self) -> bool {
        self.d1 == self.d2
    }

    pub fn check(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if m.rows() != n || m.cols() != n {
            return Err(Error::mismatch(
                format!("{n}x{n} for {self}"),
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for DimPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.d1, self.d2)
    }
}

impl TryFrom<[usize; 2]> for DimPair {
    type Error = Error;

    fn try_from(v: [usize; 2]) -> Result<Self> {
        DimPair::new(v[0], v[1])
    }
}

impl From<DimPair> for [usize; 2] {
    fn from(d: DimPair) -> Self {
        [d.d1, d.d2]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Traces out `which`: tracing A leaves a `d2 x d2` matrix, tracing B a `d1 x d1` one.
pub fn partial_trace(m: &ComplexMatrix, dims: DimPair, which: Subsystem) -> Result<ComplexMatrix> {
    dims.check(m)?;
    let (d1, d2) = (dims.d1, dims.d2);
    Ok(match which {
        Subsystem::A => ComplexMatrix::from_fn(d2, d2, |j, l| {
            (0..d1).map(|i| m[(i * d2 + j, i * d2 + l)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(d1, d1, |i, k| {
            (0..d2).map(|j| m[(i * d2 + j, k * d2 + j)]).sum()
        }),
    })
}

pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: DimPair,
    which: Subsystem,
) -> Result<ComplexMatrix> {
    dims.check(m)?;
    let d2 = dims.d2;
    let n = dims.total();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / d2, r % d2);
        let (k, l) = (c / d2, c % d2);
        match which {
            Subsystem::B => m[(i * d2 + l, k * d2 + j)],
            Subsystem::A => m[(k * d2 + j, i * d2 + l)],
        }
    }))
}

/// `R[(i,k),(j,l)] = rho[(i,j),(k,l)]`: a `d1^2 x d2^2` matrix.
pub fn realignment(m: &ComplexMatrix, dims: DimPair) -> Result<ComplexMatrix> {
    dims.check(m)?;
    let (d1, d2) = (dims.d1, dims.d2);
    let mut r = ComplexMatrix::zeros(d1 * d1, d2 * d2);
    for i in 0..d1 {
        for k in 0..d1 {
            for j in 0..d2 {
                for l in 0..d2 {
                    r[(i * d1 + k, j * d2 + l)] = m[(i * d2 + j, k * d2 + l)];
                }
            }
        }
    }
    Ok(r)
}

/// `I_{d1} (x) Tr_A(rho) - rho`, the operator that is PSD on PPT states.
pub fn reduction_operator_b(m: &ComplexMatrix, dims: DimPair) -> Result<ComplexMatrix> {
    let marginal = partial_trace(m, dims, Subsystem::A)?;
    Ok(&ComplexMatrix::identity(dims.d1).kron(&marginal) - m)
}

/// `Tr_B(rho) (x) I_{d2} - rho`
pub fn reduction_operator_a(m: &ComplexMatrix, dims: DimPair) -> Result<ComplexMatrix> {
    let marginal = partial_trace(m, dims, Subsystem::B)?;
    Ok(&marginal.kron(&ComplexMatrix::identity(dims.d2)) - m)
}

/// Embeds a vector given as `(index, amplitude)` pairs into `C^n`.
pub fn sparse_vector(n: usize, entries: &[(usize, f64)]) -> Vec<super::C64> {
    let mut v = vec![ZERO; n];
    for &(i, a) in entries {
        v[i] = super::C64::new(a, 0.0);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn phi_plus() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::outer(&sparse_vector(4, &[(0, h), (3, h)]))
    }

    #[test]
    fn dims_reject_trivial_factor() {
        assert!(DimPair::new(1, 3).is_err());
        assert!(serde_json::from_str::<DimPair>("[2,1]").is_err());
        let d: DimPair = serde_json::from_str("[2,4]").unwrap();
        assert_eq!(d.total(), 8);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = partial_trace(&phi_plus(), DimPair::qubits(), Subsystem::A).unwrap();
        assert!(r.approx_eq(&ComplexMatrix::identity(2).scale(0.5), 1e-15));
    }

    #[test]
    fn product_marginals() {
        let a = ComplexMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
        let b = ComplexMatrix::new(
            3,
            3,
            vec![
                C64::new(0.5, 0.0),
                C64::new(0.1, 0.1),
                C64::new(0.0, 0.0),
                C64::new(0.1, -0.1),
                C64::new(0.3, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.2, 0.0),
            ],
        )
        .unwrap();
        let dims = DimPair::new(2, 3).unwrap();
        let ab = a.kron(&b);
        assert!(partial_trace(&ab, dims, Subsystem::A).unwrap().approx_eq(&b, 1e-15));
        assert!(partial_trace(&ab, dims, Subsystem::B).unwrap().approx_eq(&a, 1e-15));
    }

    #[test]
    fn psi_minus_partial_transpose() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ComplexMatrix::outer(&sparse_vector(4, &[(1, h), (2, -h)]));
        let pt = partial_transpose(&psi, DimPair::qubits(), Subsystem::B).unwrap();
        let expect = ComplexMatrix::from_real(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, -0.5, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        assert!(pt.approx_eq(&expect, 1e-15));
        let twice = partial_transpose(&pt, DimPair::qubits(), Subsystem::B).unwrap();
        assert!(twice.approx_eq(&psi, 1e-15));
    }

    #[test]
    fn transposes_compose_to_full_transpose() {
        let dims = DimPair::new(2, 3).unwrap();
        let m = ComplexMatrix::from_fn(6, 6, |i, j| C64::new(i as f64, (j * j) as f64));
        let both = partial_transpose(
            &partial_transpose(&m, dims, Subsystem::A).unwrap(),
            dims,
            Subsystem::B,
        )
        .unwrap();
        assert!(both.approx_eq(&m.transpose(), 0.0));
    }

    #[test]
    fn mismatched_dims_error() {
        let m = ComplexMatrix::identity(5);
        assert!(partial_trace(&m, DimPair::qubits(), Subsystem::A).is_err());
        assert!(realignment(&m, DimPair::qubits()).is_err());
    }
}
