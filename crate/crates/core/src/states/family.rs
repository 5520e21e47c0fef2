//! Named state families with declared parameter ranges.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DimPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    /// `|phi+><phi+|` on two qubits.
    PhiPlus,
    /// Fixed two-qubit X-state detected by the `psi-` witness.
    RhoEnt,
    /// Two-parameter two-qubit NPT family `rho_{s,t}`.
    RhoSt,
    /// `alpha |phi+><phi+| + (1 - alpha) I/4`.
    Isotropic2x2,
    /// Four-projector maximally entangled mixed state with weight `q`.
    Mems,
    /// `a |phi-><phi-| + (1 - a) |01><01|`.
    RhoA,
    /// `|psi-><psi-|` embedded in `2 x 3`.
    Npt2x3,
    /// `gamma` = fidelity with the qutrit maximally entangled state.
    Isotropic3x3,
    /// Parametrized `2 x 4` family.
    RhoB,
    /// Fixed two-qubit state with six-digit decimal entries.
    Rho1,
    /// The same state with entries `21/79`, `29/79`.
    Rho1Exact,
    /// Equal mixture of `|01> - beta |10>`, `|02> - beta |20>` and the unnormalized `|00>+|11>+|22>`.
    RhoBeta,
    /// Two-qutrit PPT family with positive `x`.
    RhoX,
    /// Horodecki qutrit family; separable on `[2,3]`, PPT entangled on `(3,4]`, NPT above.
    HorodeckiGamma,
}

pub const ALL_FAMILIES: [StateFamily; 14] = [
    StateFamily::PhiPlus,
    StateFamily::RhoEnt,
    StateFamily::RhoSt,
    StateFamily::Isotropic2x2,
    StateFamily::Mems,
    StateFamily::RhoA,
    StateFamily::Npt2x3,
    StateFamily::Isotropic3x3,
    StateFamily::RhoB,
    StateFamily::Rho1,
    StateFamily::Rho1Exact,
    StateFamily::RhoBeta,
    StateFamily::RhoX,
    StateFamily::HorodeckiGamma,
];

pub const MEMS_Q_MAX: f64 = 0.97997;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub name: String,
    pub min: f64,
    /// `None` means unbounded above.
    pub max: Option<f64>,
    pub min_inclusive: bool,
    pub max_inclusive: bool,
}

impl ParamRange {
    fn closed(name: &str, min: f64, max: f64) -> Self {
        ParamRange {
            name: name.to_string(),
            min,
            max: Some(max),
            min_inclusive: true,
            max_inclusive: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let lo_ok = if self.min_inclusive { x >= self.min } else { x > self.min };
        let hi_ok = match self.max {
            None => true,
            Some(m) if self.max_inclusive => x <= m,
            Some(m) => x < m,
        };
        lo_ok && hi_ok
    }

    pub fn describe(&self) -> String {
        let l = if self.min_inclusive { '[' } else { '(' };
        match self.max {
            Some(m) => {
                let r = if self.max_inclusive { ']' } else { ')' };
                format!("{l}{}, {m}{r}", self.min)
            }
            None => format!("{l}{}, inf)", self.min),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub id: StateFamily,
    pub dims: DimPair,
    pub params: Vec<ParamRange>,
    pub source: String,
}

impl StateFamily {
    pub fn id(&self) -> &'static str {
        match self {
            StateFamily::PhiPlus => "phi_plus",
            StateFamily::RhoEnt => "rho_ent",
            StateFamily::RhoSt => "rho_st",
            StateFamily::Isotropic2x2 => "isotropic2x2",
            StateFamily::Mems => "mems",
            StateFamily::RhoA => "rho_a",
            StateFamily::Npt2x3 => "npt2x3",
            StateFamily::Isotropic3x3 => "isotropic3x3",
            StateFamily::RhoB => "rho_b",
            StateFamily::Rho1 => "rho1",
            StateFamily::Rho1Exact => "rho1_exact",
            StateFamily::RhoBeta => "rho_beta",
            StateFamily::RhoX => "rho_x",
            StateFamily::HorodeckiGamma => "horodecki_gamma",
        }
    }

    pub fn dims(&self) -> DimPair {
        match self {
            StateFamily::Npt2x3 => DimPair::new(2, 3).expect("static dims"),
            StateFamily::RhoB => DimPair::new(2, 4).expect("static dims"),
            StateFamily::Isotropic3x3
            | StateFamily::RhoBeta
            | StateFamily::RhoX
            | StateFamily::HorodeckiGamma => DimPair::qutrits(),
            _ => DimPair::qubits(),
        }
    }

    pub fn params(&self) -> Vec<ParamRange> {
        match self {
            StateFamily::PhiPlus
            | StateFamily::RhoEnt
            | StateFamily::Npt2x3
            | StateFamily::Rho1
            | StateFamily::Rho1Exact => vec![],
            StateFamily::RhoSt => vec![
                ParamRange::closed("s", 0.2926, 0.3),
                ParamRange::closed("t", 0.02, 0.0213),
            ],
            StateFamily::Isotropic2x2 => vec![ParamRange::closed("alpha", -1.0 / 3.0, 1.0)],
            StateFamily::Mems => vec![ParamRange::closed("q", 0.0, MEMS_Q_MAX)],
            StateFamily::RhoA => vec![ParamRange::closed("a", 0.0, 1.0)],
            StateFamily::Isotropic3x3 => vec![ParamRange::closed("gamma", 0.0, 1.0)],
            StateFamily::RhoB => vec![ParamRange::closed("b", 0.0, 1.0)],
            StateFamily::RhoBeta => {
                vec![ParamRange::closed("beta", std::f64::consts::FRAC_1_SQRT_2, 1.0)]
            }
            StateFamily::RhoX => vec![ParamRange {
                name: "x".into(),
                min: 0.0,
                max: None,
                min_inclusive: false,
                max_inclusive: false,
            }],
            StateFamily::HorodeckiGamma => vec![ParamRange::closed("gamma", 2.0, 5.0)],
        }
    }

    pub fn source(&self) -> &'static str {
        match self {
            StateFamily::PhiPlus => "Bell projector |phi+>",
            StateFamily::RhoEnt => "two-qubit X-state, corners 11/30, diagonal 13/30 and 1/15",
            StateFamily::RhoSt => "two-parameter two-qubit NPT family",
            StateFamily::Isotropic2x2 => "two-qubit isotropic (Werner-type) mixture",
            StateFamily::Mems => "maximally entangled mixed state, p1 = q, p2 = 3e-5",
            StateFamily::RhoA => "mixture of |phi-> and |01>",
            StateFamily::Npt2x3 => "|psi-> embedded in 2x3",
            StateFamily::Isotropic3x3 => "two-qutrit isotropic state",
            StateFamily::RhoB => "2x4 family with weight b",
            StateFamily::Rho1 => "two-qubit state, six-digit entries",
            StateFamily::Rho1Exact => "two-qubit state, entries 21/79 and 29/79",
            StateFamily::RhoBeta => "two-qutrit mixture of |0i> - beta |i0> and the GHZ-like ket",
            StateFamily::RhoX => "two-qutrit PPT family with positive x",
            StateFamily::HorodeckiGamma => "Horodecki qutrit family with sigma+ and sigma-",
        }
    }

    pub fn spec(&self) -> FamilySpec {
        FamilySpec {
            id: *self,
            dims: self.dims(),
            params: self.params(),
            source: self.source().to_string(),
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params().into_iter().map(|p| p.name).collect()
    }

    fn check_params(&self, values: &[f64]) -> Result<()> {
        let ranges = self.params();
        if ranges.len() != values.len() {
            return Err(Error::ParameterCount {
                family: self.id().to_string(),
                expected: ranges.len(),
                found: values.len(),
            });
        }
        for (r, &v) in ranges.iter().zip(values) {
            if !r.contains(v) {
                return Err(Error::ParameterOutOfRange {
                    family: self.id().to_string(),
                    name: r.name.clone(),
                    value: v,
                    range: r.describe(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_FAMILIES
            .iter()
            .find(|f| f.id() == s)
            .copied()
            .ok_or_else(|| Error::Unknown {
                kind: "state family",
                name: s.to_string(),
            })
    }
}

pub fn family_registry() -> Vec<FamilySpec> {
    ALL_FAMILIES.iter().map(|f| f.spec()).collect()
}

pub fn family_registry_json() -> Result<String> {
    Ok(serde_json::to_string_pretty(&family_registry())?)
}

fn set_sym(m: &mut [f64], n: usize, i: usize, j: usize, v: f64) {
    m[i * n + j] = v;
    m[j * n + i] = v;
}

fn outer_real(n: usize, v: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = v[i] * v[j];
        }
    }
    m
}

fn raw_entries(family: StateFamily, p: &[f64]) -> Vec<f64> {
    let n = family.dims().total();
    let mut m = vec![0.0; n * n];
    match family {
        StateFamily::PhiPlus => {
            for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
                m[i * n + j] = 0.5;
            }
        }
        StateFamily::RhoEnt => {
            m[0] = 13.0 / 30.0;
            m[15] = 13.0 / 30.0;
            set_sym(&mut m, n, 0, 3, 11.0 / 30.0);
            m[5] = 1.0 / 15.0;
            m[10] = 1.0 / 15.0;
        }
        StateFamily::RhoSt => {
            let (s, t) = (p[0], p[1]);
            m[0] = 5.0 / 8.0;
            set_sym(&mut m, n, 0, 3, t / 2.0);
            m[10] = 0.5 * (s - 0.25);
            m[15] = (1.0 - s) / 2.0;
        }
        StateFamily::Isotropic2x2 => {
            let a = p[0];
            m[0] = (1.0 + a) / 4.0;
            m[15] = (1.0 + a) / 4.0;
            m[5] = (1.0 - a) / 4.0;
            m[10] = (1.0 - a) / 4.0;
            set_sym(&mut m, n, 0, 3, a / 2.0);
        }
        StateFamily::Mems => {
            let q = p[0];
            m[0] = 0.01 + q / 2.0;
            m[15] = 0.01 + q / 2.0;
            set_sym(&mut m, n, 0, 3, 0.01 - q / 2.0);
            m[5] = 0.00003;
            m[10] = MEMS_Q_MAX - q;
        }
        StateFamily::RhoA => {
            let a = p[0];
            m[0] = a / 2.0;
            m[15] = a / 2.0;
            set_sym(&mut m, n, 0, 3, -a / 2.0);
            m[5] = 1.0 - a;
        }
        StateFamily::Npt2x3 => {
            // |01> -> 1, |10> -> 3
            m[n + 1] = 0.5;
            m[3 * n + 3] = 0.5;
            set_sym(&mut m, n, 1, 3, -0.5);
        }
        StateFamily::Isotropic3x3 => {
            let g = p[0];
            for i in 0..n {
                m[i * n + i] = (1.0 - g) / 8.0;
            }
            for i in [0, 4, 8] {
                for j in [0, 4, 8] {
                    m[i * n + j] += (9.0 * g - 1.0) / 24.0;
                }
            }
        }
        StateFamily::RhoB => {
            let b = p[0];
            let z = 6.0 * b + 1.0;
            for (i, j) in [(0, 7), (1, 6), (2, 5)] {
                m[i * n + i] = b / z;
                m[j * n + j] = b / z;
                set_sym(&mut m, n, i, j, b / z);
            }
            m[7 * n + 7] = (b + 1.0) / z;
        }
        StateFamily::Rho1 | StateFamily::Rho1Exact => {
            let (x, y) = if family == StateFamily::Rho1 {
                (0.265822, 0.367089)
            } else {
                (21.0 / 79.0, 29.0 / 79.0)
            };
            m[0] = x;
            m[5] = y;
            m[10] = y;
            set_sym(&mut m, n, 1, 2, -y);
        }
        StateFamily::RhoBeta => {
            let b = p[0];
            let mut add = |v: &[f64]| {
                for (acc, x) in m.iter_mut().zip(outer_real(n, v)) {
                    *acc += x;
                }
            };
            let mut e1 = vec![0.0; 9];
            e1[1] = 1.0;
            e1[3] = -b;
            add(&e1);
            let mut e2 = vec![0.0; 9];
            e2[2] = 1.0;
            e2[6] = -b;
            add(&e2);
            let mut e3 = vec![0.0; 9];
            e3[0] = 1.0;
            e3[4] = 1.0;
            e3[8] = 1.0;
            add(&e3);
            let z = 5.0 + 2.0 * b * b;
            m.iter_mut().for_each(|x| *x /= z);
        }
        StateFamily::RhoX => {
            let x = p[0];
            let z = 3.0 * (1.0 + x + 1.0 / x);
            for i in [0, 4, 8] {
                for j in [0, 4, 8] {
                    m[i * n + j] = 1.0 / z;
                }
            }
            for (i, v) in [(1, x), (2, 1.0 / x), (3, 1.0 / x), (5, x), (6, x), (7, 1.0 / x)] {
                m[i * n + i] = v / z;
            }
        }
        StateFamily::HorodeckiGamma => {
            let g = p[0];
            for i in [0, 4, 8] {
                for j in [0, 4, 8] {
                    m[i * n + j] = 2.0 / 21.0;
                }
            }
            // sigma+ on |01>,|12>,|20>; sigma- on |10>,|21>,|02>
            for i in [1, 5, 6] {
                m[i * n + i] = g / 21.0;
            }
            for i in [3, 7, 2] {
                m[i * n + i] = (5.0 - g) / 21.0;
            }
        }
    }
    m
}

pub fn make_family_state(family: StateFamily, params: &[f64]) -> Result<DensityMatrix> {
    family.check_params(params)?;
    let dims = family.dims();
    let n = dims.total();
    let m = ComplexMatrix::from_real(n, n, &raw_entries(family, params))?;
    DensityMatrix::new(dims, m).map_err(|e| {
        Error::Internal(format!("{family} at {params:?} violates state invariants: {e}"))
    })
}

fn sample_points(r: &ParamRange) -> Vec<f64> {
    match r.max {
        None => vec![0.5, 1.0, 2.0, 5.0],
        Some(hi) => (0..5).map(|i| r.min + (hi - r.min) * i as f64 / 4.0).collect(),
    }
}

/// Representative members of every family on `dims`, labelled `id` or
/// `id(name=value,...)`. Multi-parameter families use the corners and centre.
pub fn zoo_members(dims: DimPair) -> Vec<(String, DensityMatrix)> {
    let mut out = Vec::new();
    for f in ALL_FAMILIES.iter().filter(|f| f.dims() == dims) {
        let ranges = f.params();
        let points: Vec<Vec<f64>> = match ranges.len() {
            0 => vec![vec![]],
            1 => sample_points(&ranges[0]).into_iter().map(|x| vec![x]).collect(),
            _ => {
                let lo: Vec<f64> = ranges.iter().map(|r| r.min).collect();
                let hi: Vec<f64> = ranges.iter().map(|r| r.max.unwrap_or(r.min + 1.0)).collect();
                let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect();
                vec![lo, mid, hi]
            }
        };
        for p in points {
            let Ok(rho) = make_family_state(*f, &p) else {
                continue;
            };
            let label = if p.is_empty() {
                f.id().to_string()
            } else {
                let args: Vec<String> = ranges
                    .iter()
                    .zip(&p)
                    .map(|(r, v)| format!("{}={v}", r.name))
                    .collect();
                format!("{}({})", f.id(), args.join(","))
            };
            out.push((label, rho));
        }
    }
    out
}
