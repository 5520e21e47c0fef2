use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::WitnessOperator;
use crate::states::{battery_sample, DensityMatrix, DEFAULT_SEED};

/// Separable samples with `Tr(W rho) < -SUSPECT_TOL` mark the witness suspect.
pub const SUSPECT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifySettings {
    pub samples: usize,
    pub seed: u64,
}

impl Default for CertifySettings {
    fn default() -> Self {
        CertifySettings {
            samples: 10_000,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectedState {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificationReport {
    pub family: String,
    pub params: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub min_separable_value: f64,
    pub argmin_sample: usize,
    pub lambda_min: f64,
    pub has_negative_eigenvalue: bool,
    pub suspect: bool,
    pub detected: Vec<DetectedState>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        !self.suspect && self.has_negative_eigenvalue
    }
}

/// Minimum of `Tr(W rho_sep)` over a seeded separable battery, plus the
/// zoo members (label, state) on which the witness is negative.
pub fn certify_witness(
    w: &WitnessOperator,
    settings: &CertifySettings,
    zoo: &[(String, DensityMatrix)],
) -> CertificationReport {
    let dims = w.dims();
    let (min_value, argmin) = (0..settings.samples)
        .into_par_iter()
        .map(|i| {
            let rho = battery_sample(dims, settings.seed, i as u64);
            let v = w.expectation(&rho).expect("dims match by construction");
            (v, i)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| match a.0.total_cmp(&b.0) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    if a.1 <= b.1 {
                        a
                    } else {
                        b
                    }
                }
            },
        );
    let detected = zoo
        .iter()
        .filter(|(_, rho)| rho.dims() == dims)
        .filter_map(|(label, rho)| {
            let v = w.expectation(rho).ok()?;
            (v < 0.0).then(|| DetectedState {
                label: label.clone(),
                value: v,
            })
        })
        .collect();
    CertificationReport {
        family: w.family().to_string(),
        params: w.params().to_vec(),
        samples: settings.samples,
        seed: settings.seed,
        min_separable_value: min_value,
        argmin_sample: argmin,
        lambda_min: w.lambda_min(),
        has_negative_eigenvalue: w.lambda_min() < 0.0,
        suspect: min_value < -SUSPECT_TOL,
        detected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DimPair;
    use crate::states::zoo_members;
    use crate::witness::{wl_p, wl_p_matrix, wl_psi_minus};

    #[test]
    fn wl_p_passes_small_battery() {
        let s = CertifySettings {
            samples: 500,
            seed: 1,
        };
        let r = certify_witness(&wl_p(0.5).unwrap(), &s, &[]);
        assert!(r.passed(), "{r:?}");
        assert!(r.min_separable_value >= 0.0);
    }

    #[test]
    fn corrupted_witness_is_flagged() {
        let w = WitnessOperator::from_matrix(DimPair::qubits(), wl_p_matrix(-0.1), "wl_p", vec![-0.1])
            .unwrap();
        let s = CertifySettings {
            samples: 2000,
            seed: 42,
        };
        let r = certify_witness(&w, &s, &[]);
        assert!(r.suspect);
        assert!(!r.passed());
    }

    #[test]
    fn zoo_detection_lists_rho_ent() {
        let s = CertifySettings {
            samples: 10,
            seed: 0,
        };
        let r = certify_witness(&wl_psi_minus(), &s, &zoo_members(DimPair::qubits()));
        assert!(r.detected.iter().any(|d| d.label == "rho_ent"));
    }

    #[test]
    fn report_is_deterministic() {
        let s = CertifySettings {
            samples: 300,
            seed: 9,
        };
        let a = certify_witness(&wl_p(0.3).unwrap(), &s, &[]);
        let b = certify_witness(&wl_p(0.3).unwrap(), &s, &[]);
        assert_eq!(a.min_separable_value, b.min_separable_value);
        assert_eq!(a.argmin_sample, b.argmin_sample);
    }
}
