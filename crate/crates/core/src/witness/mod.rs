//! Linear entanglement witnesses, expectation values, the determinant gap
//! `k` and sampling-based certification.

mod certify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_spectrum, partial_transpose, real_determinant, ComplexMatrix, DimPair, Subsystem,
    C64, HERMITIAN_TOL,
};
use crate::states::DensityMatrix;

pub use certify::{certify_witness, CertificationReport, CertifySettings, DetectedState};

/// Hermitian operator with at least one negative eigenvalue.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessOperator {
    dims: DimPair,
    matrix: ComplexMatrix,
    family: String,
    params: Vec<f64>,
    lambda_min: f64,
}

impl WitnessOperator {
    pub fn from_matrix(
        dims: DimPair,
        matrix: ComplexMatrix,
        family: impl Into<String>,
        params: Vec<f64>,
    ) -> Result<Self> {
        dims.check(&matrix)?;
        let matrix = matrix.require_hermitian(HERMITIAN_TOL)?;
        let lambda_min = hermitian_spectrum(&matrix)?.lambda_min();
        if lambda_min >= -1e-12 {
            return Err(Error::InvalidWitness(format!(
                "no negative eigenvalue (lambda_min = {lambda_min:e})"
            )));
        }
        Ok(WitnessOperator {
            dims,
            matrix,
            family: family.into(),
            params,
            lambda_min,
        })
    }

    pub fn dims(&self) -> DimPair {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn squared(&self) -> ComplexMatrix {
        &self.matrix * &self.matrix
    }

    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dims() != self.dims {
            return Err(Error::mismatch(self.dims, rho.dims()));
        }
        expectation(&self.matrix, rho)
    }
}

/// `Tr(W rho)` for Hermitian `W`; the imaginary residue is checked.
pub fn expectation(w: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    rho.dims().check(w)?;
    let z = w.trace_product(rho.matrix())?;
    let tol = 1e-10 * w.max_abs().max(1.0);
    if z.im.abs() > tol {
        return Err(Error::Internal(format!(
            "expectation has imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn real_matrix(n: usize, entries: &[(usize, usize, f64)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = C64::new(v, 0.0);
    }
    m
}

pub fn wl_p_matrix(p: f64) -> ComplexMatrix {
    real_matrix(
        4,
        &[
            (0, 0, p / 2.0),
            (1, 1, (1.0 - p) / 2.0),
            (1, 2, 0.5),
            (2, 1, 0.5),
            (2, 2, (1.0 - p) / 2.0),
            (3, 3, p / 2.0),
        ],
    )
}

pub fn wl_p(p: f64) -> Result<WitnessOperator> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            family: "wl_p".into(),
            name: "p".into(),
            value: p,
            range: "(0, 1]".into(),
        });
    }
    WitnessOperator::from_matrix(DimPair::qubits(), wl_p_matrix(p), "wl_p", vec![p])
}

/// `(|psi><psi|)^{T_B}` for a normalized `psi`.
pub fn wl_projector(psi: &[C64], dims: DimPair) -> Result<WitnessOperator> {
    if psi.len() != dims.total() {
        return Err(Error::mismatch(dims.total(), psi.len()));
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWitness(format!("projector vector has norm {norm}")));
    }
    let m = partial_transpose(&ComplexMatrix::outer(psi), dims, Subsystem::B)?;
    WitnessOperator::from_matrix(dims, m, "projector", vec![])
}

pub fn wl_psi_minus() -> WitnessOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = crate::linalg::sparse_vector(4, &[(1, h), (2, -h)]);
    let mut w = wl_projector(&psi, DimPair::qubits()).expect("static witness");
    w.family = "psi_minus".into();
    w
}

/// `|psi->` on `2 x 3`, components on `|01>` and `|10>`.
pub fn wl_psi_minus_2x3() -> WitnessOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let dims = DimPair::new(2, 3).expect("static dims");
    let psi = crate::linalg::sparse_vector(6, &[(1, h), (3, -h)]);
    let mut w = wl_projector(&psi, dims).expect("static witness");
    w.family = "psi_minus_2x3".into();
    w
}

/// The two-qutrit projector witness, entered as its explicit matrix.
pub fn wl_phi_3x3() -> WitnessOperator {
    let m = real_matrix(9, &[(0, 0, 0.5), (1, 3, 0.5), (3, 1, 0.5), (4, 4, 0.5)]);
    WitnessOperator::from_matrix(DimPair::qutrits(), m, "phi_3x3", vec![]).expect("static witness")
}

/// The `2 x 4` projector witness, entered as its explicit matrix.
pub fn wl_phi_2x4() -> WitnessOperator {
    let m = real_matrix(8, &[(0, 0, 0.5), (1, 4, 0.5), (4, 1, 0.5), (5, 5, 0.5)]);
    WitnessOperator::from_matrix(DimPair::new(2, 4).expect("static dims"), m, "phi_2x4", vec![])
        .expect("static witness")
}

pub fn wl_c_matrix() -> ComplexMatrix {
    let mut e = vec![];
    for i in [0, 4, 8] {
        e.push((i, i, 1.0));
        for j in [0, 4, 8] {
            if i != j {
                e.push((i, j, -1.0));
            }
        }
    }
    for i in [1, 5, 6] {
        e.push((i, i, 9.0));
    }
    for i in [2, 3, 7] {
        e.push((i, i, 1.0));
    }
    real_matrix(9, &e).scale(1.0 / 33.0)
}

pub fn wl_c() -> WitnessOperator {
    WitnessOperator::from_matrix(DimPair::qutrits(), wl_c_matrix(), "wl_c", vec![])
        .expect("static witness")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessFamily {
    WlP,
    PsiMinus,
    #[serde(rename = "psi_minus_2x3")]
    PsiMinus2x3,
    #[serde(rename = "phi_3x3")]
    Phi3x3,
    #[serde(rename = "phi_2x4")]
    Phi2x4,
    WlC,
}

pub const ALL_WITNESSES: [WitnessFamily; 6] = [
    WitnessFamily::WlP,
    WitnessFamily::PsiMinus,
    WitnessFamily::PsiMinus2x3,
    WitnessFamily::Phi3x3,
    WitnessFamily::Phi2x4,
    WitnessFamily::WlC,
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub id: WitnessFamily,
    pub dims: DimPair,
    pub params: Vec<String>,
    pub source: String,
}

impl WitnessFamily {
    pub fn id(&self) -> &'static str {
        match self {
            WitnessFamily::WlP => "wl_p",
            WitnessFamily::PsiMinus => "psi_minus",
            WitnessFamily::PsiMinus2x3 => "psi_minus_2x3",
            WitnessFamily::Phi3x3 => "phi_3x3",
            WitnessFamily::Phi2x4 => "phi_2x4",
            WitnessFamily::WlC => "wl_c",
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        match self {
            WitnessFamily::WlP => vec!["p".into()],
            _ => vec![],
        }
    }

    pub fn dims(&self) -> DimPair {
        match self {
            WitnessFamily::WlP | WitnessFamily::PsiMinus => DimPair::qubits(),
            WitnessFamily::PsiMinus2x3 => DimPair::new(2, 3).expect("static dims"),
            WitnessFamily::Phi2x4 => DimPair::new(2, 4).expect("static dims"),
            WitnessFamily::Phi3x3 | WitnessFamily::WlC => DimPair::qutrits(),
        }
    }

    pub fn source(&self) -> &'static str {
        match self {
            WitnessFamily::WlP => "two-qubit witness with p in (0,1]",
            WitnessFamily::PsiMinus => "partial transpose of |psi-><psi-|",
            WitnessFamily::PsiMinus2x3 => "partial transpose of |psi-> embedded in 2x3",
            WitnessFamily::Phi3x3 => "partial transpose of |phi+> embedded in 3x3",
            WitnessFamily::Phi2x4 => "partial transpose of |phi+> embedded in 2x4",
            WitnessFamily::WlC => "non-decomposable two-qutrit witness, scale 1/33",
        }
    }

    pub fn build(&self, params: &[f64]) -> Result<WitnessOperator> {
        let expected = self.param_names().len();
        if params.len() != expected {
            return Err(Error::ParameterCount {
                family: self.id().into(),
                expected,
                found: params.len(),
            });
        }
        match self {
            WitnessFamily::WlP => wl_p(params[0]),
            WitnessFamily::PsiMinus => Ok(wl_psi_minus()),
            WitnessFamily::PsiMinus2x3 => Ok(wl_psi_minus_2x3()),
            WitnessFamily::Phi3x3 => Ok(wl_phi_3x3()),
            WitnessFamily::Phi2x4 => Ok(wl_phi_2x4()),
            WitnessFamily::WlC => Ok(wl_c()),
        }
    }

    pub fn spec(&self) -> WitnessSpec {
        WitnessSpec {
            id: *self,
            dims: self.dims(),
            params: self.param_names(),
            source: self.source().into(),
        }
    }
}

impl fmt::Display for WitnessFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for WitnessFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_WITNESSES
            .iter()
            .find(|w| w.id() == s)
            .copied()
            .ok_or_else(|| Error::Unknown {
                kind: "witness family",
                name: s.into(),
            })
    }
}

pub fn witness_registry_json() -> Result<String> {
    let specs: Vec<WitnessSpec> = ALL_WITNESSES.iter().map(|w| w.spec()).collect();
    Ok(serde_json::to_string_pretty(&specs)?)
}

/// `k = det(I + Tr_A rho) - det(I + rho)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KTerm {
    pub value: f64,
    pub det_marginal: f64,
    pub det_full: f64,
}

pub fn k_term(rho: &DensityMatrix) -> KTerm {
    let d2 = rho.dims().d2();
    let n = rho.dims().total();
    let det_marginal = real_determinant(&(&ComplexMatrix::identity(d2) + &rho.marginal_b()))
        .expect("square");
    let det_full =
        real_determinant(&(&ComplexMatrix::identity(n) + rho.matrix())).expect("square");
    KTerm {
        value: det_marginal - det_full,
        det_marginal,
        det_full,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_family_state, StateFamily};

    fn st(f: StateFamily, p: &[f64]) -> DensityMatrix {
        make_family_state(f, p).unwrap()
    }

    #[test]
    fn wl_p_at_one() {
        let m = wl_p(1.0).unwrap();
        let e = real_matrix(4, &[(0, 0, 0.5), (1, 2, 0.5), (2, 1, 0.5), (3, 3, 0.5)]);
        assert!(m.matrix().approx_eq(&e, 0.0));
        assert!((m.lambda_min() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn wl_p_range() {
        assert!(wl_p(0.0).is_err());
        assert!(wl_p(1.01).is_err());
        for p in [0.1, 0.37, 0.9] {
            assert!((wl_p(p).unwrap().lambda_min() + p / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn bell_expectations() {
        let phi = st(StateFamily::PhiPlus, &[]);
        for p in [0.2, 0.5, 1.0] {
            let w = wl_p(p).unwrap();
            assert!((w.expectation(&phi).unwrap() - p / 2.0).abs() < 1e-14);
        }
        let k = k_term(&phi);
        assert!((k.det_marginal - 2.25).abs() < 1e-13);
        assert!((k.det_full - 2.0).abs() < 1e-13);
        assert!((k.value - 0.25).abs() < 1e-13);
    }

    #[test]
    fn psi_minus_detects_rho_ent() {
        let v = wl_psi_minus()
            .expectation(&st(StateFamily::RhoEnt, &[]))
            .unwrap();
        assert!((v + 0.3).abs() < 1e-14);
    }

    #[test]
    fn projector_witness_matches_displayed_matrices() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = crate::linalg::sparse_vector(9, &[(0, h), (4, h)]);
        let w = wl_projector(&v, DimPair::qutrits()).unwrap();
        assert!(w.matrix().approx_eq(wl_phi_3x3().matrix(), 1e-15));
        let v = crate::linalg::sparse_vector(8, &[(0, h), (5, h)]);
        let w = wl_projector(&v, DimPair::new(2, 4).unwrap()).unwrap();
        assert!(w.matrix().approx_eq(wl_phi_2x4().matrix(), 1e-15));
        assert!(wl_projector(&[C64::new(1.0, 0.0); 4], DimPair::qubits()).is_err());
    }

    #[test]
    fn wl_c_trace_and_family_values() {
        let w = wl_c();
        assert!((w.matrix().trace().re - 1.0).abs() < 1e-14);
        let spec = hermitian_spectrum(w.matrix()).unwrap();
        assert!((spec.lambda_min() + 1.0 / 33.0).abs() < 1e-13);
        assert!((spec.lambda_max() - 9.0 / 33.0).abs() < 1e-13);
        for g in [2.0, 3.3, 5.0] {
            let v = w.expectation(&st(StateFamily::HorodeckiGamma, &[g])).unwrap();
            assert!((v - (3.0 + 8.0 * g) / 231.0).abs() < 1e-14);
        }
        for g in [0.0, 0.5, 1.0] {
            let v = w.expectation(&st(StateFamily::Isotropic3x3, &[g])).unwrap();
            assert!((v - (17.0 - 21.0 * g) / 132.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rho_a_expectation() {
        for (p, a) in [(0.3, 0.6), (0.01, 0.95)] {
            let v = wl_p(p).unwrap().expectation(&st(StateFamily::RhoA, &[a])).unwrap();
            assert!((v - (1.0 - a + p * (-1.0 + 2.0 * a)) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn maximally_mixed_expectation_is_normalized_trace() {
        let w = wl_c();
        let r = DensityMatrix::maximally_mixed(DimPair::qutrits());
        assert!((w.expectation(&r).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn k_of_maximally_mixed_qubits() {
        let k = k_term(&DensityMatrix::maximally_mixed(DimPair::qubits()));
        assert!((k.value - (9.0 / 4.0 - (5.0f64 / 4.0).powi(4))).abs() < 1e-14);
    }

    #[test]
    fn registry_round_trip() {
        let json = witness_registry_json().unwrap();
        for w in ALL_WITNESSES {
            assert!(json.contains(w.id()));
            assert_eq!(w.id().parse::<WitnessFamily>().unwrap(), w);
            assert_eq!(w.build(&vec![0.5; w.param_names().len()]).unwrap().dims(), w.dims());
        }
    }

    #[test]
    fn psd_matrix_is_not_a_witness() {
        assert!(matches!(
            WitnessOperator::from_matrix(DimPair::qubits(), ComplexMatrix::identity(4), "id", vec![]),
            Err(Error::InvalidWitness(_))
        ));
    }
}
