//! Expansion of bipartite Hermitian operators over products of local
//! observables: `I, X, Y, Z` for qubits and `I, t1..t8` (Gell-Mann, with
//! `t7 = diag(1,-1,0)` and `t8 = diag(1,1,-2)/sqrt 3`) for qutrits.

mod reference;

pub use reference::{
    compare, errata, reference_tables, wnl1_static_operator, Discrepancy, Erratum, ReferenceTable,
};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gell_mann_generators, ComplexMatrix, DimPair, HERMITIAN_TOL};

pub const RESIDUAL_TOL: f64 = 1e-10;

/// Unnormalized local observables with `Tr(O_a O_b) = norms[a] delta_ab`.
#[derive(Clone, Debug)]
pub struct LocalBasis {
    dim: usize,
    labels: Vec<String>,
    observables: Vec<ComplexMatrix>,
    norms: Vec<f64>,
}

impl LocalBasis {
    pub fn new(dim: usize) -> Result<Self> {
        let labels: Vec<String> = match dim {
            2 => ["I", "X", "Y", "Z"].iter().map(|s| s.to_string()).collect(),
            3 => std::iter::once("I".to_string())
                .chain((1..=8).map(|i| format!("t{i}")))
                .collect(),
            _ => return Err(Error::Unsupported(format!("local basis for d = {dim}"))),
        };
        let observables = gell_mann_generators(dim)?;
        let norms = observables.iter().map(|o| (o * o).trace().re).collect();
        Ok(LocalBasis { dim, labels, observables, norms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub dims: DimPair,
    pub labels_a: Vec<String>,
    pub labels_b: Vec<String>,
    /// Row-major over `(a, b)`.
    pub coefficients: Vec<f64>,
    pub residual: f64,
    /// Largest imaginary part met while projecting.
    pub imag_residual: f64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    basis_a: &'a str,
    basis_b: &'a str,
    coefficient: f64,
}

impl DecompositionResult {
    pub fn coefficient(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels_a.iter().position(|l| l == a)?;
        let j = self.labels_b.iter().position(|l| l == b)?;
        Some(self.coefficients[i * self.labels_b.len() + j])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        let nb = self.labels_b.len();
        self.coefficients.iter().enumerate().map(move |(k, &c)| {
            (self.labels_a[k / nb].as_str(), self.labels_b[k % nb].as_str(), c)
        })
    }

    /// Entries with `|c| > tol`, in table order.
    pub fn nonzero(&self, tol: f64) -> Vec<(String, String, f64)> {
        self.entries()
            .filter(|e| e.2.abs() > tol)
            .map(|(a, b, c)| (a.to_string(), b.to_string(), c))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (basis_a, basis_b, coefficient) in self.entries() {
            w.serialize(CsvRow { basis_a, basis_b, coefficient })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn bases(dims: DimPair) -> Result<(LocalBasis, LocalBasis)> {
    Ok((LocalBasis::new(dims.d1())?, LocalBasis::new(dims.d2())?))
}

/// `c_ab = Tr(h O_a (x) O_b) / (Tr O_a^2 Tr O_b^2)`, with the reconstruction
/// residual checked against [`RESIDUAL_TOL`] relative to `max(1, max|h|)`.
pub fn decompose(h: &ComplexMatrix, dims: DimPair) -> Result<DecompositionResult> {
    dims.check(h)?;
    let h = h.require_hermitian(HERMITIAN_TOL)?;
    let (ba, bb) = bases(dims)?;
    let mut coefficients = Vec::with_capacity(ba.observables.len() * bb.observables.len());
    let mut imag_residual: f64 = 0.0;
    for (oa, na) in ba.observables.iter().zip(&ba.norms) {
        for (ob, nb) in bb.observables.iter().zip(&bb.norms) {
            let z = h.trace_product(&oa.kron(ob))? / (na * nb);
            imag_residual = imag_residual.max(z.im.abs());
            coefficients.push(z.re);
        }
    }
    let mut r = DecompositionResult {
        dims,
        labels_a: ba.labels.clone(),
        labels_b: bb.labels.clone(),
        coefficients,
        residual: 0.0,
        imag_residual,
    };
    r.residual = reconstruct(&r)?.max_abs_diff(&h);
    let scale = h.max_abs().max(1.0);
    if r.residual > RESIDUAL_TOL * scale || imag_residual > RESIDUAL_TOL * scale {
        return Err(Error::Internal(format!(
            "decomposition residual {:e}, imaginary part {:e}",
            r.residual, imag_residual
        )));
    }
    Ok(r)
}

/// `sum c_ab O_a (x) O_b`.
pub fn reconstruct(d: &DecompositionResult) -> Result<ComplexMatrix> {
    let (ba, bb) = bases(d.dims)?;
    let nb = bb.observables.len();
    if d.coefficients.len() != ba.observables.len() * nb {
        return Err(Error::mismatch(ba.observables.len() * nb, d.coefficients.len()));
    }
    let n = d.dims.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &c) in d.coefficients.iter().enumerate() {
        if c != 0.0 {
            out = &out + &ba.observables[k / nb].kron(&bb.observables[k % nb]).scale(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{wl_c, wl_p};

    #[test]
    fn bases_are_orthogonal() {
        for d in [2, 3] {
            let b = LocalBasis::new(d).unwrap();
            for (i, x) in b.observables().iter().enumerate() {
                for (j, y) in b.observables().iter().enumerate() {
                    let t = x.trace_product(y).unwrap();
                    let want = if i == j { b.norms()[i] } else { 0.0 };
                    assert!((t.re - want).abs() < 1e-14 && t.im.abs() < 1e-14);
                }
            }
        }
        assert!(LocalBasis::new(4).is_err());
    }

    #[test]
    fn wl_p_has_four_terms() {
        let p = 0.37;
        let r = decompose(wl_p(p).unwrap().matrix(), DimPair::qubits()).unwrap();
        assert_eq!(r.nonzero(1e-14).len(), 4);
        assert_eq!(r.coefficient("I", "I"), Some(0.25));
        assert!((r.coefficient("Z", "Z").unwrap() - (2.0 * p - 1.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn squared_wl_p_xx_coefficient() {
        let p = 0.6;
        let w = wl_p(p).unwrap();
        let r = decompose(&w.squared(), w.dims()).unwrap();
        assert!((r.coefficient("X", "X").unwrap() - (1.0 - p) / 4.0).abs() < 1e-15);
        assert!((r.coefficient("Y", "Y").unwrap() - (1.0 - p) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn wl_c_sign_pattern() {
        let r = decompose(&wl_c().matrix().clone(), DimPair::qutrits()).unwrap();
        for i in 1..=3 {
            let t = format!("t{i}");
            assert!(r.coefficient(&t, &t).unwrap() < 0.0);
        }
        for i in 4..=6 {
            let t = format!("t{i}");
            assert!(r.coefficient(&t, &t).unwrap() > 0.0);
        }
        let x = r.coefficient("t7", "t8").unwrap();
        assert!(x > 0.0 && (x + r.coefficient("t8", "t7").unwrap()).abs() < 1e-15);
        assert!(reconstruct(&r).unwrap().approx_eq(wl_c().matrix(), 1e-15));
    }

    #[test]
    fn zero_table_reconstructs_zero() {
        let r = decompose(&ComplexMatrix::zeros(6, 6), DimPair::new(2, 3).unwrap()).unwrap();
        assert!(r.coefficients.iter().all(|&c| c == 0.0));
        assert_eq!(reconstruct(&r).unwrap(), ComplexMatrix::zeros(6, 6));
    }

    #[test]
    fn csv_layout() {
        let r = decompose(&ComplexMatrix::identity(4), DimPair::qubits()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("basis_a,basis_b,coefficient"));
        assert_eq!(lines.next(), Some("I,I,1.0"));
        assert_eq!(s.lines().count(), 17);
    }

    #[test]
    fn unsupported_dimension() {
        assert!(decompose(&ComplexMatrix::identity(8), DimPair::new(2, 4).unwrap()).is_err());
    }
}
