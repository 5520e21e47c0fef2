use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_spectrum, partial_trace, partial_transpose, ComplexMatrix, DimPair, Spectrum,
    Subsystem, C64, HERMITIAN_TOL,
};

pub const TRACE_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-9;

/// Unit-trace PSD Hermitian matrix on a `d1 x d2` system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityMatrix {
    dims: DimPair,
    matrix: ComplexMatrix,
}

#[derive(Deserialize)]
struct RawDensity {
    dims: DimPair,
    matrix: ComplexMatrix,
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDensity::deserialize(d)?;
        DensityMatrix::new(raw.dims, raw.matrix).map_err(serde::de::Error::custom)
    }
}

/// Checks the density-matrix invariants on a square matrix of any size and
/// returns its symmetrized copy.
pub fn validate_state_matrix(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = m.require_hermitian(HERMITIAN_TOL)?;
    let tr = h.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    let min_eigenvalue = hermitian_spectrum(&h)?.lambda_min();
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(h)
}

impl DensityMatrix {
    pub fn new(dims: DimPair, matrix: ComplexMatrix) -> Result<Self> {
        dims.check(&matrix)?;
        let matrix = validate_state_matrix(&matrix)?;
        Ok(DensityMatrix { dims, matrix })
    }

    pub fn from_real(dims: DimPair, entries: &[f64]) -> Result<Self> {
        let n = dims.total();
        Self::new(dims, ComplexMatrix::from_real(n, n, entries)?)
    }

    pub fn pure(dims: DimPair, psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("state vector norm {norm} differs from 1")));
        }
        Self::new(dims, ComplexMatrix::outer(psi))
    }

    pub fn maximally_mixed(dims: DimPair) -> Self {
        let n = dims.total();
        DensityMatrix {
            dims,
            matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64),
        }
    }

    /// `rho_a (x) rho_b` from two local states.
    pub fn product(rho_a: &ComplexMatrix, rho_b: &ComplexMatrix) -> Result<Self> {
        let dims = DimPair::new(rho_a.rows(), rho_b.rows())?;
        let a = validate_state_matrix(rho_a)?;
        let b = validate_state_matrix(rho_b)?;
        Self::new(dims, a.kron(&b))
    }

    pub fn dims(&self) -> DimPair {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr_A(rho)`, the state of B.
    pub fn marginal_b(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, self.dims, Subsystem::A).expect("dims checked at construction")
    }

    /// `Tr_B(rho)`, the state of A.
    pub fn marginal_a(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, self.dims, Subsystem::B).expect("dims checked at construction")
    }

    pub fn spectrum(&self) -> Spectrum {
        hermitian_spectrum(&self.matrix).expect("Hermitian at construction")
    }

    pub fn lambda_max(&self) -> f64 {
        self.spectrum().lambda_max()
    }

    pub fn partial_transpose_b(&self) -> ComplexMatrix {
        partial_transpose(&self.matrix, self.dims, Subsystem::B)
            .expect("dims checked at construction")
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::mismatch(self.dims, other.dims));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidState(format!("mixing weight {w} outside [0,1]")));
        }
        Self::new(
            self.dims,
            &self.matrix.scale(w) + &other.matrix.scale(1.0 - w),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PptClass {
    Ppt,
    Npt,
}

impl std::fmt::Display for PptClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PptClass::Ppt => "PPT",
            PptClass::Npt => "NPT",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub class: PptClass,
    pub min_pt_eigenvalue: f64,
}

pub const PPT_TOL: f64 = 1e-10;

pub fn ppt_classify(rho: &DensityMatrix) -> PptReport {
    let min_pt_eigenvalue = hermitian_spectrum(&rho.partial_transpose_b())
        .expect("partial transpose of a Hermitian matrix is Hermitian")
        .lambda_min();
    let class = if min_pt_eigenvalue < -PPT_TOL {
        PptClass::Npt
    } else {
        PptClass::Ppt
    };
    PptReport {
        class,
        min_pt_eigenvalue,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_matrices() {
        let d = DimPair::qubits();
        assert!(DensityMatrix::new(d, ComplexMatrix::identity(4)).is_err());
        assert!(matches!(
            DensityMatrix::from_real(d, &[0.6, 0.0, 0.0, 0.0, 0.0, 0.6, 0.0, 0.0, 0.0, 0.0, -0.2, 0.0, 0.0, 0.0, 0.0, 0.0]),
            Err(Error::NotPositive { .. })
        ));
        let mut m = ComplexMatrix::identity(4).scale(0.25);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(d, m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn maximally_mixed_is_ppt() {
        let r = ppt_classify(&DensityMatrix::maximally_mixed(DimPair::qutrits()));
        assert_eq!(r.class, PptClass::Ppt);
        assert!((r.min_pt_eigenvalue - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_revalidates() {
        let rho = DensityMatrix::maximally_mixed(DimPair::qubits());
        let s = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rho);
        let bad = s.replace("0.25", "0.5");
        assert!(serde_json::from_str::<DensityMatrix>(&bad).is_err());
    }
}
