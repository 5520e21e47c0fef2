//! Nonlinear witnesses built from a linear witness `W` and the probe state.
//!
//! Every construction here depends on the probe state (through `k`, `h2`,
//! the marginals or the correlation matrix), so the main entry point is
//! [`evaluate`], which returns the value together with every term needed to
//! recompute it. [`materialize`] returns the explicit operator for a given
//! probe state when the matrix itself is wanted.

mod correlation;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_spectrum, real_determinant, reduction_operator_b, ComplexMatrix, DimPair,
};
use crate::states::DensityMatrix;
use crate::witness::{expectation, k_term, KTerm, WitnessOperator};

pub use correlation::{wl_ccnr, wl_dv, CorrelationWitness};

pub const AUDIT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NlewKind {
    #[serde(rename = "F_BASIC")]
    FBasic,
    #[serde(rename = "WNL1")]
    Wnl1,
    #[serde(rename = "WNL2")]
    Wnl2,
    #[serde(rename = "WNL3")]
    Wnl3,
    #[serde(rename = "WNL4")]
    Wnl4,
    #[serde(rename = "CCNR_L")]
    CcnrL,
    #[serde(rename = "CCNR_NL")]
    CcnrNl,
    #[serde(rename = "DV_L")]
    DvL,
    #[serde(rename = "DV_NL")]
    DvNl,
}

pub const ALL_KINDS: [NlewKind; 9] = [
    NlewKind::FBasic,
    NlewKind::Wnl1,
    NlewKind::Wnl2,
    NlewKind::Wnl3,
    NlewKind::Wnl4,
    NlewKind::CcnrL,
    NlewKind::CcnrNl,
    NlewKind::DvL,
    NlewKind::DvNl,
];

impl NlewKind {
    pub fn name(&self) -> &'static str {
        match self {
            NlewKind::FBasic => "F_BASIC",
            NlewKind::Wnl1 => "WNL1",
            NlewKind::Wnl2 => "WNL2",
            NlewKind::Wnl3 => "WNL3",
            NlewKind::Wnl4 => "WNL4",
            NlewKind::CcnrL => "CCNR_L",
            NlewKind::CcnrNl => "CCNR_NL",
            NlewKind::DvL => "DV_L",
            NlewKind::DvNl => "DV_NL",
        }
    }

    /// Kinds built from a supplied linear witness.
    pub fn needs_witness(&self) -> bool {
        matches!(
            self,
            NlewKind::FBasic | NlewKind::Wnl1 | NlewKind::Wnl2 | NlewKind::Wnl3 | NlewKind::Wnl4
        )
    }

    pub fn needs_sep_max(&self) -> bool {
        *self == NlewKind::Wnl4
    }

    /// The linear, state-dependent correlation witnesses.
    pub fn is_linear(&self) -> bool {
        matches!(self, NlewKind::CcnrL | NlewKind::DvL)
    }
}

impl fmt::Display for NlewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NlewKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_KINDS
            .iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::Unknown {
                kind: "NLEW kind",
                name: s.into(),
            })
    }
}

/// All terms entering an evaluation. Fields a kind does not use stay `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Intermediates {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tr_w_rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tr_w2_rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<KTerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction_expectation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction_lambda_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sep_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_marginal_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max_rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tr_c_rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_trace_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_asymmetry: Option<f64>,
}

impl Intermediates {
    /// Compact `key=value;...` form for CSV rows.
    pub fn digest(&self) -> String {
        let mut parts = Vec::new();
        let mut push = |name: &str, v: Option<f64>| {
            if let Some(x) = v {
                parts.push(format!("{name}={x:.10e}"));
            }
        };
        push("tr_w", self.tr_w_rho);
        push("tr_w2", self.tr_w2_rho);
        push("k", self.k.map(|k| k.value));
        push("red", self.reduction_expectation);
        push("red_min", self.reduction_lambda_min);
        push("sep_max", self.sep_max);
        push("h1", self.h1);
        push("h2", self.h2);
        push("lmax_rho", self.lambda_max_rho);
        push("lmax_w", self.lambda_max_w);
        push("c1", self.correlation_trace_norm);
        push("asym", self.correlation_asymmetry);
        parts.join(";")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlewEvaluation {
    pub kind: NlewKind,
    pub dims: DimPair,
    pub value: f64,
    pub intermediates: Intermediates,
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Internal(format!("intermediate `{name}` missing")))
}

impl NlewEvaluation {
    /// Recomputes the value from the logged intermediates alone.
    pub fn recompute(&self) -> Result<f64> {
        let im = &self.intermediates;
        let n = self.dims.total() as f64;
        let d2 = self.dims.d2() as f64;
        let k = || {
            im.k.map(|k| k.det_marginal - k.det_full)
                .ok_or_else(|| Error::Internal("intermediate `k` missing".into()))
        };
        Ok(match self.kind {
            NlewKind::FBasic => need(im.tr_w2_rho, "tr_w2")? + need(im.tr_w_rho, "tr_w")?,
            NlewKind::Wnl1 => {
                need(im.tr_w2_rho, "tr_w2")? / n + n / (n + 1.0) * need(im.tr_w_rho, "tr_w")?
                    - k()?
            }
            NlewKind::Wnl2 => {
                need(im.tr_w2_rho, "tr_w2")? + n * n * need(im.tr_w_rho, "tr_w")? - k()? / d2
                    + d2 * need(im.reduction_expectation, "red")?
            }
            NlewKind::Wnl3 => {
                need(im.tr_w2_rho, "tr_w2")? - k()? / (n * n)
                    + n * n * need(im.reduction_expectation, "red")?
            }
            NlewKind::Wnl4 => {
                let d1 = self.dims.d1() as i32;
                let h2 = need(im.det_rho, "det_rho")?
                    - (need(im.det_marginal_b, "det_marginal_b")? / d1 as f64).powi(d1);
                need(im.sep_max, "sep_max")? - need(im.tr_w2_rho, "tr_w2")?
                    + h2 * need(im.tr_w_rho, "tr_w")?
            }
            NlewKind::CcnrL | NlewKind::DvL | NlewKind::CcnrNl | NlewKind::DvNl => {
                let lin = need(im.identity_coefficient, "identity_coefficient")?
                    - need(im.tr_c_rho, "tr_c")? / need(im.lambda_max_rho, "lmax_rho")?;
                if self.kind.is_linear() {
                    lin
                } else {
                    lin - need(im.tr_w2_rho, "tr_w2")? / need(im.lambda_max_w, "lmax_w")?
                }
            }
        })
    }

    pub fn audit(&self) -> Result<()> {
        let r = self.recompute()?;
        if (r - self.value).abs() > AUDIT_TOL {
            return Err(Error::Internal(format!(
                "{} self-audit: value {} vs recomputed {}",
                self.kind, self.value, r
            )));
        }
        Ok(())
    }

    /// Negative value on a valid construction. The state-dependent linear
    /// correlation witnesses count only where `lambda_max(W_L) > 0`; a
    /// negative definite `W_L` is negative on every state and detects nothing.
    pub fn detects(&self) -> bool {
        if self.kind.is_linear() && self.intermediates.lambda_max_w.is_some_and(|l| l <= 0.0) {
            return false;
        }
        self.value < 0.0
    }
}

fn check_dims(w: &WitnessOperator, rho: &DensityMatrix) -> Result<()> {
    if w.dims() != rho.dims() {
        return Err(Error::mismatch(w.dims(), rho.dims()));
    }
    Ok(())
}

/// `W^2 + W`
pub fn f_basic(w: &WitnessOperator) -> ComplexMatrix {
    &w.squared() + w.matrix()
}

fn base_terms(w: &WitnessOperator, rho: &DensityMatrix) -> Result<(f64, f64, ComplexMatrix)> {
    check_dims(w, rho)?;
    let w2 = w.squared();
    Ok((expectation(w.matrix(), rho)?, expectation(&w2, rho)?, w2))
}

fn reduction_terms(rho: &DensityMatrix) -> Result<(ComplexMatrix, f64, f64)> {
    let op = reduction_operator_b(rho.matrix(), rho.dims())?;
    let e = expectation(&op, rho)?;
    let lmin = hermitian_spectrum(&op)?.lambda_min();
    Ok((op, e, lmin))
}

fn finish(kind: NlewKind, rho: &DensityMatrix, value: f64, im: Intermediates) -> Result<NlewEvaluation> {
    let ev = NlewEvaluation {
        kind,
        dims: rho.dims(),
        value,
        intermediates: im,
    };
    ev.audit()?;
    Ok(ev)
}

pub fn f_basic_evaluate(w: &WitnessOperator, rho: &DensityMatrix) -> Result<NlewEvaluation> {
    let (tr_w, tr_w2, _) = base_terms(w, rho)?;
    let value = expectation(&f_basic(w), rho)?;
    finish(
        NlewKind::FBasic,
        rho,
        value,
        Intermediates {
            tr_w_rho: Some(tr_w),
            tr_w2_rho: Some(tr_w2),
            ..Default::default()
        },
    )
}

/// `Tr(W^2 rho)/n + n/(n+1) Tr(W rho) - k`, `n = d1 d2`.
pub fn wnl1_evaluate(w: &WitnessOperator, rho: &DensityMatrix) -> Result<NlewEvaluation> {
    let (tr_w, tr_w2, _) = base_terms(w, rho)?;
    let k = k_term(rho);
    let n = rho.dims().total() as f64;
    let value = tr_w2 / n + n / (n + 1.0) * tr_w - k.value;
    finish(
        NlewKind::Wnl1,
        rho,
        value,
        Intermediates {
            tr_w_rho: Some(tr_w),
            tr_w2_rho: Some(tr_w2),
            k: Some(k),
            ..Default::default()
        },
    )
}

/// `Tr(W^2 rho) + n^2 Tr(W rho) - k/d2 + d2 Tr[(I (x) Tr_A rho - rho) rho]`.
pub fn wnl2_evaluate(w: &WitnessOperator, rho: &DensityMatrix) -> Result<NlewEvaluation> {
    let (tr_w, tr_w2, _) = base_terms(w, rho)?;
    let k = k_term(rho);
    let (_, red, red_min) = reduction_terms(rho)?;
    let n = rho.dims().total() as f64;
    let d2 = rho.dims().d2() as f64;
    let value = tr_w2 + n * n * tr_w - k.value / d2 + d2 * red;
    finish(
        NlewKind::Wnl2,
        rho,
        value,
        Intermediates {
            tr_w_rho: Some(tr_w),
            tr_w2_rho: Some(tr_w2),
            k: Some(k),
            reduction_expectation: Some(red),
            reduction_lambda_min: Some(red_min),
            ..Default::default()
        },
    )
}

/// `Tr(W^2 rho) - k/n^2 + n^2 Tr[(I (x) Tr_A rho - rho) rho]`.
pub fn wnl3_evaluate(w: &WitnessOperator, rho: &DensityMatrix) -> Result<NlewEvaluation> {
    let (tr_w, tr_w2, _) = base_terms(w, rho)?;
    let k = k_term(rho);
    let (_, red, red_min) = reduction_terms(rho)?;
    let n = rho.dims().total() as f64;
    let value = tr_w2 - k.value / (n * n) + n * n * red;
    finish(
        NlewKind::Wnl3,
        rho,
        value,
        Intermediates {
            tr_w_rho: Some(tr_w),
            tr_w2_rho: Some(tr_w2),
            k: Some(k),
            reduction_expectation: Some(red),
            reduction_lambda_min: Some(red_min),
            ..Default::default()
        },
    )
}

/// `det(rho) - (det(Tr_A rho)/d1)^d1`, returned with both determinants.
pub fn h2_term(rho: &DensityMatrix) -> (f64, f64, f64) {
    let det_rho = real_determinant(rho.matrix()).expect("square");
    let det_marginal = real_determinant(&rho.marginal_b()).expect("square");
    let d1 = rho.dims().d1() as i32;
    (det_rho - (det_marginal / d1 as f64).powi(d1), det_rho, det_marginal)
}

fn check_sep_max(w2: &ComplexMatrix, sep_max: f64) -> Result<f64> {
    let lmin = hermitian_spectrum(w2)?.lambda_min();
    if !sep_max.is_finite() || sep_max < lmin - 1e-12 {
        return Err(Error::Undefined(format!(
            "sep_max {sep_max} is below lambda_min(W^2) = {lmin}"
        )));
    }
    Ok(lmin)
}

/// `sep_max - Tr(W^2 rho) + h2 Tr(W rho)`.
pub fn wnl4_evaluate(w: &WitnessOperator, rho: &DensityMatrix, sep_max: f64) -> Result<NlewEvaluation> {
    let (tr_w, tr_w2, w2) = base_terms(w, rho)?;
    check_sep_max(&w2, sep_max)?;
    let (h2, det_rho, det_marginal) = h2_term(rho);
    let h1 = sep_max - tr_w2;
    let value = h1 + h2 * tr_w;
    finish(
        NlewKind::Wnl4,
        rho,
        value,
        Intermediates {
            tr_w_rho: Some(tr_w),
            tr_w2_rho: Some(tr_w2),
            sep_max: Some(sep_max),
            h1: Some(h1),
            h2: Some(h2),
            det_rho: Some(det_rho),
            det_marginal_b: Some(det_marginal),
            ..Default::default()
        },
    )
}

fn correlation_evaluate(kind: NlewKind, rho: &DensityMatrix) -> Result<NlewEvaluation> {
    let cw = match kind {
        NlewKind::CcnrL | NlewKind::CcnrNl => wl_ccnr(rho)?,
        _ => wl_dv(rho)?,
    };
    let tr_w = expectation(&cw.matrix, rho)?;
    let tr_c = expectation(&cw.correlation_operator, rho)?;
    let tr_w2 = expectation(&(&cw.matrix * &cw.matrix), rho)?;
    let spec = hermitian_spectrum(&cw.matrix)?;
    let lmax_w = spec.lambda_max();
    let value = if kind.is_linear() {
        tr_w
    } else {
        if lmax_w <= 0.0 {
            return Err(Error::Undefined(format!(
                "{kind}: lambda_max(W_L) = {lmax_w:e} <= 0"
            )));
        }
        tr_w - tr_w2 / lmax_w
    };
    finish(
        kind,
        rho,
        value,
        Intermediates {
            tr_w_rho: Some(tr_w),
            tr_w2_rho: Some(tr_w2),
            k: Some(cw.k),
            lambda_max_rho: Some(cw.lambda_max_rho),
            lambda_max_w: Some(lmax_w),
            lambda_min_w: Some(spec.lambda_min()),
            identity_coefficient: Some(cw.identity_coefficient),
            tr_c_rho: Some(tr_c),
            correlation_trace_norm: Some(cw.correlation_trace_norm),
            correlation_asymmetry: Some(cw.asymmetry),
            ..Default::default()
        },
    )
}

pub fn wl_ccnr_evaluate(rho: &DensityMatrix) -> Result<NlewEvaluation> {
    correlation_evaluate(NlewKind::CcnrL, rho)
}

pub fn wl_dv_evaluate(rho: &DensityMatrix) -> Result<NlewEvaluation> {
    correlation_evaluate(NlewKind::DvL, rho)
}

/// `Tr(W_L rho) - Tr(W_L^2 rho)/lambda_max(W_L)` with the CCNR witness.
pub fn wnl_ccnr_evaluate(rho: &DensityMatrix) -> Result<NlewEvaluation> {
    correlation_evaluate(NlewKind::CcnrNl, rho)
}

pub fn wnl_dv_evaluate(rho: &DensityMatrix) -> Result<NlewEvaluation> {
    correlation_evaluate(NlewKind::DvNl, rho)
}

fn require_witness(kind: NlewKind, w: Option<&WitnessOperator>) -> Result<&WitnessOperator> {
    w.ok_or_else(|| Error::config("witness", format!("{kind} needs a linear witness")))
}

fn require_sep_max(sep_max: Option<f64>) -> Result<f64> {
    sep_max.ok_or_else(|| Error::config("sep_max", "WNL4 needs the separable maximum of Tr(W^2 rho)"))
}

pub fn evaluate(
    kind: NlewKind,
    w: Option<&WitnessOperator>,
    rho: &DensityMatrix,
    sep_max: Option<f64>,
) -> Result<NlewEvaluation> {
    match kind {
        NlewKind::FBasic => f_basic_evaluate(require_witness(kind, w)?, rho),
        NlewKind::Wnl1 => wnl1_evaluate(require_witness(kind, w)?, rho),
        NlewKind::Wnl2 => wnl2_evaluate(require_witness(kind, w)?, rho),
        NlewKind::Wnl3 => wnl3_evaluate(require_witness(kind, w)?, rho),
        NlewKind::Wnl4 => wnl4_evaluate(require_witness(kind, w)?, rho, require_sep_max(sep_max)?),
        _ => correlation_evaluate(kind, rho),
    }
}

/// The explicit operator whose expectation on `rho` is [`evaluate`]'s value.
/// It is tailored to `rho` and is not a witness for other states.
pub fn materialize(
    kind: NlewKind,
    w: Option<&WitnessOperator>,
    rho: &DensityMatrix,
    sep_max: Option<f64>,
) -> Result<ComplexMatrix> {
    let n = rho.dims().total();
    let nf = n as f64;
    let id = ComplexMatrix::identity(n);
    match kind {
        NlewKind::FBasic => {
            let w = require_witness(kind, w)?;
            check_dims(w, rho)?;
            Ok(f_basic(w))
        }
        NlewKind::Wnl1 => {
            let w = require_witness(kind, w)?;
            check_dims(w, rho)?;
            let k = k_term(rho).value;
            Ok(&(&w.squared().scale(1.0 / nf) + &w.matrix().scale(nf / (nf + 1.0))) - &id.scale(k))
        }
        NlewKind::Wnl2 => {
            let w = require_witness(kind, w)?;
            check_dims(w, rho)?;
            let k = k_term(rho).value;
            let d2 = rho.dims().d2() as f64;
            let (red, _, _) = reduction_terms(rho)?;
            let m = &(&w.squared() + &w.matrix().scale(nf * nf)) - &id.scale(k / d2);
            Ok(&m + &red.scale(d2))
        }
        NlewKind::Wnl3 => {
            let w = require_witness(kind, w)?;
            check_dims(w, rho)?;
            let k = k_term(rho).value;
            let (red, _, _) = reduction_terms(rho)?;
            Ok(&(&w.squared() - &id.scale(k / (nf * nf))) + &red.scale(nf * nf))
        }
        NlewKind::Wnl4 => {
            let w = require_witness(kind, w)?;
            check_dims(w, rho)?;
            let sep_max = require_sep_max(sep_max)?;
            let w2 = w.squared();
            check_sep_max(&w2, sep_max)?;
            let (h2, _, _) = h2_term(rho);
            Ok(&(&id.scale(sep_max) - &w2) + &w.matrix().scale(h2))
        }
        NlewKind::CcnrL => Ok(wl_ccnr(rho)?.matrix),
        NlewKind::DvL => Ok(wl_dv(rho)?.matrix),
        NlewKind::CcnrNl | NlewKind::DvNl => {
            let cw = if kind == NlewKind::CcnrNl {
                wl_ccnr(rho)?
            } else {
                wl_dv(rho)?
            };
            let lmax = hermitian_spectrum(&cw.matrix)?.lambda_max();
            if lmax <= 0.0 {
                return Err(Error::Undefined(format!("{kind}: lambda_max(W_L) = {lmax:e} <= 0")));
            }
            let w2 = &cw.matrix * &cw.matrix;
            Ok(&cw.matrix - &w2.scale(1.0 / lmax))
        }
    }
}
