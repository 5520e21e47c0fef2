//! Hermitian eigendecomposition (cyclic Jacobi), singular values (one-sided
//! Jacobi) and LU determinants.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, HERMITIAN_TOL, ONE, ZERO};
use crate::error::Result;

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending. Empty when only singular values were requested.
    pub eigenvalues: Vec<f64>,
    /// Descending, non-negative. Empty when only eigenvalues were requested.
    pub singular_values: Vec<f64>,
}

impl Spectrum {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn trace_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }
}

/// Eigenvalues ascending with matching unit eigenvectors as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.values[k] * v[(j, k)].conj()).sum()
        })
    }
}

/// The unitary 2x2 block `G` on coordinates (p, q) such that `G^dagger A G`
/// zeroes the (p, q) entry of the Hermitian pencil `[[app, apq], [conj(apq), aqq]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [[C64; 2]; 2] {
    let r = apq.norm();
    let phase = apq.conj() / r;
    let zeta = (aqq - app) / (2.0 * r);
    let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
    let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    [
        [C64::new(c, 0.0), C64::new(s, 0.0)],
        [-phase * s, phase * c],
    ]
}

fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, g: &[[C64; 2]; 2]) {
    for i in 0..m.rows() {
        let a = m[(i, p)];
        let b = m[(i, q)];
        m[(i, p)] = a * g[0][0] + b * g[1][0];
        m[(i, q)] = a * g[0][1] + b * g[1][1];
    }
}

fn rotate_rows_adjoint(m: &mut ComplexMatrix, p: usize, q: usize, g: &[[C64; 2]; 2]) {
    for j in 0..m.cols() {
        let a = m[(p, j)];
        let b = m[(q, j)];
        m[(p, j)] = g[0][0].conj() * a + g[1][0].conj() * b;
        m[(q, j)] = g[0][1].conj() * a + g[1][1].conj() * b;
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Full eigendecomposition of a Hermitian matrix. The input is symmetrized
/// before iterating; a defect above [`HERMITIAN_TOL`] is rejected.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let mut a = h.require_hermitian(HERMITIAN_TOL)?;
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let g = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_columns(&mut a, p, q, &g);
                rotate_rows_adjoint(&mut a, p, q, &g);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                rotate_columns(&mut v, p, q, &g);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigenDecomposition { values, vectors })
}

pub fn hermitian_spectrum(h: &ComplexMatrix) -> Result<Spectrum> {
    Ok(Spectrum {
        eigenvalues: hermitian_eigen(h)?.values,
        singular_values: Vec::new(),
    })
}

pub fn lambda_min(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_spectrum(h)?.lambda_min())
}

pub fn lambda_max(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_spectrum(h)?.lambda_max())
}

/// Unit eigenvector of the largest eigenvalue, with that eigenvalue.
pub fn top_eigenpair(h: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let e = hermitian_eigen(h)?;
    let k = e.values.len() - 1;
    Ok((e.values[k], e.vector(k)))
}

pub fn is_positive_semidefinite(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(lambda_min(h)? >= -tol)
}

/// Singular values by one-sided Jacobi orthogonalization of the columns.
pub fn singular_values(m: &ComplexMatrix) -> Spectrum {
    let mut u = if m.rows() >= m.cols() {
        m.clone()
    } else {
        m.adjoint()
    };
    let n = u.cols();
    let rows = u.rows();
    let eps = 1e-15;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for i in 0..rows {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    alpha += up.norm_sqr();
                    beta += uq.norm_sqr();
                    gamma += up.conj() * uq;
                }
                if gamma.norm() <= eps * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let g = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut u, p, q, &g);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..n)
        .map(|j| (0..rows).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Spectrum {
        eigenvalues: Vec::new(),
        singular_values: sv,
    }
}

pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).trace_norm()
}

/// LU with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    let n = m.require_square()?;
    let mut a = m.clone();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)].norm() == 0.0 {
            return Ok(ZERO);
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        let d = a[(col, col)];
        det *= d;
        for i in col + 1..n {
            let f = a[(i, col)] / d;
            if f == ZERO {
                continue;
            }
            for j in col..n {
                let t = a[(col, j)];
                a[(i, j)] -= f * t;
            }
        }
    }
    Ok(det)
}

/// Real part of the determinant of a Hermitian matrix (whose determinant is real).
pub fn real_determinant(m: &ComplexMatrix) -> Result<f64> {
    Ok(determinant(m)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn psi_minus_witness() -> ComplexMatrix {
        ComplexMatrix::from_real(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, -0.5, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap()
    }

    #[test]
    fn bell_witness_spectrum() {
        let s = hermitian_spectrum(&psi_minus_witness()).unwrap();
        let expect = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let h = ComplexMatrix::new(
            3,
            3,
            vec![
                C64::new(2.0, 0.0),
                C64::new(1.0, -1.0),
                C64::new(0.0, 0.5),
                C64::new(1.0, 1.0),
                C64::new(-1.0, 0.0),
                C64::new(0.3, 0.2),
                C64::new(0.0, -0.5),
                C64::new(0.3, -0.2),
                C64::new(0.5, 0.0),
            ],
        )
        .unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert!(e.reconstruct().approx_eq(&h, 1e-12));
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = e.values.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_spectrum(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn identity_cases() {
        let i = ComplexMatrix::identity(5);
        let s = singular_values(&i);
        assert_eq!(s.singular_values.len(), 5);
        assert!((s.trace_norm() - 5.0).abs() < 1e-14);
        assert!((determinant(&i).unwrap() - ONE).norm() < 1e-14);
    }

    #[test]
    fn singular_values_of_rectangular() {
        // rank-one 2x3 with norm sqrt(14)*sqrt(2)
        let m = ComplexMatrix::from_real(2, 3, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]).unwrap();
        let s = singular_values(&m);
        assert_eq!(s.singular_values.len(), 2);
        assert!((s.singular_values[0] - 28f64.sqrt()).abs() < 1e-12);
        assert!(s.singular_values[1].abs() < 1e-12);
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = ComplexMatrix::from_real(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 4.0, -3.0, 8.0])
            .unwrap();
        assert!((determinant(&m).unwrap().re - (-2.0)).abs() < 1e-12);
    }
}
