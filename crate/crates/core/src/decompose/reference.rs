use serde::Serialize;

use super::{decompose, DecompositionResult};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, DimPair};
use crate::witness::{wl_c, wl_p, WitnessOperator};

const COMPARE_TOL: f64 = 1e-10;

/// Published coefficient table for a fixed operator. Entries not listed are zero.
#[derive(Clone, Debug, Serialize)]
pub struct ReferenceTable {
    pub name: String,
    pub dims: DimPair,
    pub params: Vec<f64>,
    pub entries: Vec<(String, String, f64)>,
    #[serde(skip)]
    pub operator: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub basis_a: String,
    pub basis_b: String,
    pub reference: f64,
    pub computed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Erratum {
    pub table: String,
    pub params: Vec<f64>,
    pub basis_a: String,
    pub basis_b: String,
    pub reference: f64,
    pub computed: f64,
}

/// `W^2/n + n/(n+1) W`: the first nonlinear construction without its
/// state-dependent identity shift `-k I`.
pub fn wnl1_static_operator(w: &WitnessOperator) -> ComplexMatrix {
    let n = w.dims().total() as f64;
    &w.squared().scale(1.0 / n) + &w.matrix().scale(n / (n + 1.0))
}

fn diag(labels: &[&str], v: f64) -> Vec<(String, String, f64)> {
    labels.iter().map(|l| (l.to_string(), l.to_string(), v)).collect()
}

fn e(a: &str, b: &str, v: f64) -> (String, String, f64) {
    (a.to_string(), b.to_string(), v)
}

/// All published tables, the qubit ones at parameter `p`.
pub fn reference_tables(p: f64) -> Result<Vec<ReferenceTable>> {
    let w = wl_p(p)?;
    let c = wl_c();
    let s3 = 3f64.sqrt();
    let q = DimPair::qubits();
    let t = DimPair::qutrits();
    let sym = ["t1", "t2", "t3"];
    let anti = ["t4", "t5", "t6"];
    let dg = ["t7", "t8"];

    let mut wlp = vec![e("I", "I", 0.25), e("Z", "Z", (2.0 * p - 1.0) / 4.0)];
    wlp.extend(diag(&["X", "Y"], 0.25));

    let mut wlp2 = vec![e("I", "I", (1.0 + p * p - p) / 4.0), e("Z", "Z", (p - 1.0) / 4.0)];
    wlp2.extend(diag(&["X", "Y"], 2.0 * (1.0 - p) / 4.0));

    let mut nl1 = vec![
        e("I", "I", (5.0 * p * p - 5.0 * p + 21.0) / 80.0),
        e("Z", "Z", (37.0 * p - 21.0) / 80.0),
    ];
    nl1.extend(diag(&["X", "Y"], (13.0 - 5.0 * p) / 40.0));

    let mut wc = vec![
        e("I", "I", 11.0 / 3.0 / 33.0),
        e("t7", "t8", 2.0 * s3 / 33.0),
        e("t8", "t7", -2.0 * s3 / 33.0),
    ];
    wc.extend(diag(&sym, -0.5 / 33.0));
    wc.extend(diag(&anti, 0.5 / 33.0));
    wc.extend(diag(&dg, -2.0 / 33.0));

    let x = 30503.0 * s3 / 16335.0 / 33.0;
    let mut nlc = vec![e("I", "I", 30253.0 / 294030.0), e("t7", "t8", x), e("t8", "t7", -x)];
    nlc.extend(diag(&sym, -2683.0 / 5940.0 / 33.0));
    nlc.extend(diag(&anti, 2683.0 / 5940.0 / 33.0));
    nlc.extend(diag(&dg, -2768.0 / 1485.0 / 33.0));

    let table = |name: &str, dims, params: Vec<f64>, entries, operator| ReferenceTable {
        name: name.to_string(),
        dims,
        params,
        entries,
        operator,
    };
    Ok(vec![
        table("wl_p", q, vec![p], wlp, w.matrix().clone()),
        table("wl_p_squared", q, vec![p], wlp2, w.squared()),
        table("wnl1_wl_p", q, vec![p], nl1, wnl1_static_operator(&w)),
        table("wl_c", t, vec![], wc, c.matrix().clone()),
        table("wnl1_wl_c", t, vec![], nlc, wnl1_static_operator(&c)),
    ])
}

/// Entries where the computed table and the reference differ by more than `1e-10`.
pub fn compare(result: &DecompositionResult, table: &ReferenceTable) -> Vec<Discrepancy> {
    let reference = |a: &str, b: &str| {
        table
            .entries
            .iter()
            .filter(|x| x.0 == a && x.1 == b)
            .map(|x| x.2)
            .sum::<f64>()
    };
    result
        .entries()
        .filter_map(|(a, b, computed)| {
            let r = reference(a, b);
            ((r - computed).abs() > COMPARE_TOL).then(|| Discrepancy {
                basis_a: a.to_string(),
                basis_b: b.to_string(),
                reference: r,
                computed,
            })
        })
        .collect()
}

/// Recomputed coefficients that disagree with a published table at `p`.
pub fn errata(p: f64) -> Result<Vec<Erratum>> {
    let mut out = Vec::new();
    for t in reference_tables(p)? {
        let r = decompose(&t.operator, t.dims)?;
        for d in compare(&r, &t) {
            out.push(Erratum {
                table: t.name.clone(),
                params: t.params.clone(),
                basis_a: d.basis_a,
                basis_b: d.basis_b,
                reference: d.reference,
                computed: d.computed,
            });
        }
    }
    Ok(out)
}
