//! Hilbert–Schmidt orthonormal operator bases and correlation matrices.
//!
//! Ordering: identity, symmetric off-diagonals `(j,k)` with `j < k` in
//! lexicographic order, antisymmetric off-diagonals in the same order, then
//! the diagonal generators. For `d = 3` this is the usual Gell-Mann order
//! `λ1..λ8`, and for `d = 2` it is `I, σx, σy, σz`.

use serde::{Deserialize, Serialize};

use super::bipartite::{realignment, DimPair};
use super::matrix::{ComplexMatrix, C64};
use super::spectral::{singular_values, trace_norm};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Generalized Gell-Mann generators with `Tr(λa λb) = 2 δab`, prefixed by the identity.
pub fn gell_mann_generators(d: usize) -> Result<Vec<ComplexMatrix>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut out = vec![ComplexMatrix::identity(d)];
    for j in 0..d {
        for k in j + 1..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = C64::new(1.0, 0.0);
            m[(k, j)] = C64::new(1.0, 0.0);
            out.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = C64::new(0.0, -1.0);
            m[(k, j)] = C64::new(0.0, 1.0);
            out.push(m);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(l) {
            *x = norm;
        }
        diag[l] = -(l as f64) * norm;
        out.push(ComplexMatrix::from_diagonal(&diag));
    }
    Ok(out)
}

pub fn canonical_basis(d: usize) -> Result<HermitianBasis> {
    let gens = gell_mann_generators(d)?;
    let elements = gens
        .into_iter()
        .enumerate()
        .map(|(a, g)| {
            if a == 0 {
                g.scale(1.0 / (d as f64).sqrt())
            } else {
                g.scale(std::f64::consts::FRAC_1_SQRT_2)
            }
        })
        .collect();
    Ok(HermitianBasis { dim: d, elements })
}

pub const BASIS_CONVENTION: &str = "identity/sym-offdiag/antisym-offdiag/diag, HS-normalized";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub dims: DimPair,
    /// Row-major `d1^2 x d2^2`.
    pub entries: Vec<f64>,
    pub basis_convention: String,
}

impl CorrelationMatrix {
    pub fn rows(&self) -> usize {
        self.dims.d1() * self.dims.d1()
    }

    pub fn cols(&self) -> usize {
        self.dims.d2() * self.dims.d2()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.cols() + b]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows(), self.cols(), |a, b| C64::new(self.get(a, b), 0.0))
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.to_matrix())
    }

    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.to_matrix()).singular_values
    }

    /// `max |C_ab - C_ba|`; infinite for rectangular C.
    pub fn asymmetry(&self) -> f64 {
        if self.rows() != self.cols() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a + 1..n {
                worst = worst.max((self.get(a, b) - self.get(b, a)).abs());
            }
        }
        worst
    }
}

/// `C_ab = Tr(rho G_a (x) G_b)` in the canonical bases of each factor.
pub fn correlation_matrix_canonical(rho: &ComplexMatrix, dims: DimPair) -> Result<CorrelationMatrix> {
    dims.check(rho)?;
    let ga = canonical_basis(dims.d1())?;
    let gb = canonical_basis(dims.d2())?;
    let (d1, d2) = (dims.d1(), dims.d2());
    let mut entries = Vec::with_capacity(ga.len() * gb.len());
    for a in ga.elements() {
        for b in gb.elements() {
            // Tr(rho (A (x) B)) = sum rho[(k,l),(i,j)] A[i,k] B[j,l]
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d1 {
                for k in 0..d1 {
                    let aik = a[(i, k)];
                    if aik.norm() == 0.0 {
                        continue;
                    }
                    for j in 0..d2 {
                        for l in 0..d2 {
                            let bjl = b[(j, l)];
                            if bjl.norm() == 0.0 {
                                continue;
                            }
                            acc += rho[(k * d2 + l, i * d2 + j)] * aik * bjl;
                        }
                    }
                }
            }
            if acc.im.abs() > 1e-9 {
                return Err(Error::NotHermitian { defect: acc.im.abs() });
            }
            entries.push(acc.re);
        }
    }
    Ok(CorrelationMatrix {
        dims,
        entries,
        basis_convention: BASIS_CONVENTION.to_string(),
    })
}

/// Trace norm via the realignment route; must equal the correlation route.
pub fn realignment_trace_norm(rho: &ComplexMatrix, dims: DimPair) -> Result<f64> {
    Ok(trace_norm(&realignment(rho, dims)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::bipartite::sparse_vector;

    #[test]
    fn orthonormal_for_small_dims() {
        for d in 2..=5 {
            let b = canonical_basis(d).unwrap();
            assert_eq!(b.len(), d * d);
            for (i, x) in b.elements().iter().enumerate() {
                assert!(x.is_hermitian(1e-15));
                if i > 0 {
                    assert!(x.trace().norm() < 1e-14);
                }
                for (j, y) in b.elements().iter().enumerate() {
                    let ip = x.trace_product(y).unwrap();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(expect, 0.0)).norm() < 1e-14, "d={d} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn qutrit_last_generator_is_lambda8() {
        let g = gell_mann_generators(3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!(g[8].approx_eq(&ComplexMatrix::from_diagonal(&[s, s, -2.0 * s]), 1e-15));
    }

    #[test]
    fn qubit_generators_are_paulis() {
        let g = gell_mann_generators(2).unwrap();
        assert_eq!(g[1][(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(g[2][(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(g[3], ComplexMatrix::from_diagonal(&[1.0, -1.0]));
    }

    #[test]
    fn maximally_mixed_correlations() {
        let rho = ComplexMatrix::identity(4).scale(0.25);
        let c = correlation_matrix_canonical(&rho, DimPair::qubits()).unwrap();
        assert!((c.get(0, 0) - 0.5).abs() < 1e-15);
        assert!(c.entries.iter().skip(1).all(|x| x.abs() < 1e-15));
        assert!((c.trace_norm() - 0.5).abs() < 1e-14);
        let r = realignment_trace_norm(&rho, DimPair::qubits()).unwrap();
        assert!((r - 0.5).abs() < 1e-14);
    }

    #[test]
    fn bell_trace_norm_is_two() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = ComplexMatrix::outer(&sparse_vector(4, &[(0, h), (3, h)]));
        let c = correlation_matrix_canonical(&rho, DimPair::qubits()).unwrap();
        assert!((c.trace_norm() - 2.0).abs() < 1e-12);
        let r = realignment_trace_norm(&rho, DimPair::qubits()).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_correlation_has_rank_one() {
        let a = ComplexMatrix::from_real(2, 2, &[0.8, 0.3, 0.3, 0.2]).unwrap();
        let b = ComplexMatrix::from_diagonal(&[0.1, 0.6, 0.3]);
        let c = correlation_matrix_canonical(&a.kron(&b), DimPair::new(2, 3).unwrap()).unwrap();
        let sv = c.singular_values();
        assert!(sv[0] > 1e-3);
        assert!(sv[1..].iter().all(|s| s.abs() < 1e-12));
    }
}
