//! State-dependent linear witnesses from the CCNR and de Vicente bounds.
//!
//! `W_L = (c - d^2 (d+1)^2 k) I - C / lambda_max(rho)` where `C` is the
//! canonical correlation matrix read as an operator on the computational
//! basis (row `a` of `C` acts on basis vector `a`). `c = 1` for CCNR and
//! `d(d-1)/2` for de Vicente.
//!
//! `C` is used through its symmetric part `(C + C^T)/2`. For states whose `C`
//! is symmetric this changes nothing; for the others the raw matrix gives an
//! operator that is not Hermitian and whose nonlinear extension goes negative
//! on separable states, so the symmetric part is the one that keeps the
//! separable-positivity guarantee. The asymmetry `max |C - C^T|` is reported.

use crate::error::{Error, Result};
use crate::linalg::{correlation_matrix_canonical, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::witness::{k_term, KTerm};

#[derive(Clone, Debug)]
pub struct CorrelationWitness {
    pub matrix: ComplexMatrix,
    /// The embedded symmetric correlation operator `(C + C^T)/2`.
    pub correlation_operator: ComplexMatrix,
    pub identity_coefficient: f64,
    pub k: KTerm,
    pub lambda_max_rho: f64,
    /// `||C||_1` of the raw correlation matrix.
    pub correlation_trace_norm: f64,
    pub asymmetry: f64,
}

fn build(rho: &DensityMatrix, constant: impl Fn(usize) -> f64) -> Result<CorrelationWitness> {
    let dims = rho.dims();
    if !dims.is_symmetric() {
        return Err(Error::Unsupported(format!(
            "correlation witnesses need d x d systems, got {dims}"
        )));
    }
    let d = dims.d1();
    let c = correlation_matrix_canonical(rho.matrix(), dims)?;
    let raw = c.to_matrix();
    let sym = (&raw + &raw.transpose()).scale(0.5);
    let k = k_term(rho);
    let lambda_max_rho = rho.lambda_max();
    let df = d as f64;
    let identity_coefficient = constant(d) - df * df * (df + 1.0) * (df + 1.0) * k.value;
    let matrix = &ComplexMatrix::identity(d * d).scale(identity_coefficient)
        - &sym.scale(1.0 / lambda_max_rho);
    Ok(CorrelationWitness {
        matrix,
        correlation_operator: sym,
        identity_coefficient,
        k,
        lambda_max_rho,
        correlation_trace_norm: c.trace_norm(),
        asymmetry: c.asymmetry(),
    })
}

pub fn wl_ccnr(rho: &DensityMatrix) -> Result<CorrelationWitness> {
    build(rho, |_| 1.0)
}

pub fn wl_dv(rho: &DensityMatrix) -> Result<CorrelationWitness> {
    build(rho, |d| (d * (d - 1)) as f64 / 2.0)
}
