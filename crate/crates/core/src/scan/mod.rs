//! Batch front end: parameter sweeps with detection-interval extraction,
//! witness certification, separable maximization, decomposition export and
//! the reproduction suite. Every command returns plain data; the `nlew`
//! binary only parses flags, writes files and maps errors to exit codes.

mod config;
mod detect;
mod reproduce;

pub use config::{
    Axis, AxisOwner, OutputConfig, ParamAxis, ResolvedSweep, SepMaxMethod, SepMaxSource,
    StateConfig, SweepConfig, Tolerances, WitnessConfig, DEFAULT_BISECTION_ITERATIONS,
    DEFAULT_BISECTION_TOL, DEFAULT_POINTS,
};
pub use detect::{
    run_sweep, write_intervals_csv, write_rows_csv, AxisDetection, DetectionReport, DetectionRow,
    DetectionSummary, Interval, KindValue, LineIntervals,
};
pub use reproduce::{reproduce, Checkpoint, ErratumNote, ReproduceSettings, ReproductionReport, Tag};

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decompose::{decompose, errata, wnl1_static_operator, DecompositionResult, Erratum};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DimPair};
use crate::sepmax::{closed_form_wlp, seesaw_max, SeesawSettings, SepMaxResult, WLC_REPORTED_MAX};
use crate::states::{zoo_members, DEFAULT_SEED};
use crate::witness::{certify_witness, CertificationReport, CertifySettings, WitnessFamily, WitnessOperator};

/// Bisection for a sign change of `f` on `[lo, hi]`; `None` without one.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::config("config", e.to_string()))
}

#[derive(Debug)]
pub struct DetectOutcome {
    pub report: DetectionReport,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

/// Runs a sweep and writes the per-point CSV and the JSON report (summary
/// plus rows). Paths default to `detect.csv` and `detect.json` in `out_dir`.
/// Relative output paths in the configuration are taken under `out_dir`.
pub fn cmd_detect(config: &SweepConfig, out_dir: &Path) -> Result<DetectOutcome> {
    let under = |p: &PathBuf| if p.is_absolute() { p.clone() } else { out_dir.join(p) };
    let mut config = config.clone();
    let csv_path = config.output.csv.as_ref().map_or_else(|| out_dir.join("detect.csv"), under);
    let json_path = config.output.json.as_ref().map_or_else(|| out_dir.join("detect.json"), under);
    config.output.sepmax_cache = config.output.sepmax_cache.as_ref().map(under);
    for p in [Some(&csv_path), config.output.sepmax_cache.as_ref()].into_iter().flatten() {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            create_dir(dir)?;
        }
    }
    create_dir(out_dir)?;
    let sweep = config.resolve()?;
    let report = run_sweep(&sweep)?;
    write_rows_csv(&report, fs::File::create(&csv_path)?)?;
    write_json(&json_path, &report)?;
    Ok(DetectOutcome { report, csv_path, json_path })
}

/// A witness named by family and parameters, or given as an explicit matrix.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessRef {
    pub witness: Option<String>,
    pub params: Vec<f64>,
    pub matrix: Option<ComplexMatrix>,
    pub dims: Option<DimPair>,
}

impl WitnessRef {
    pub fn named(family: &str, params: &[f64]) -> Self {
        WitnessRef {
            witness: Some(family.to_string()),
            params: params.to_vec(),
            ..Default::default()
        }
    }

    fn dims_or_config(&self) -> Result<DimPair> {
        self.dims.ok_or_else(|| Error::config("dims", "an explicit matrix needs dims"))
    }

    pub fn build(&self) -> Result<WitnessOperator> {
        match (&self.witness, &self.matrix) {
            (Some(name), None) => {
                let f: WitnessFamily = name
                    .parse()
                    .map_err(|e: Error| Error::config("witness", e.to_string()))?;
                f.build(&self.params)
                    .map_err(|e| Error::config("params", e.to_string()))
            }
            (None, Some(m)) => WitnessOperator::from_matrix(
                self.dims_or_config()?,
                m.clone(),
                "custom",
                self.params.clone(),
            ),
            _ => Err(Error::config("witness", "give exactly one of `witness` or `matrix`")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyRequest {
    #[serde(flatten)]
    pub witness: WitnessRef,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_samples() -> usize {
    CertifySettings::default().samples
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl CertifyRequest {
    pub fn load(path: &Path) -> Result<Self> {
        read_config(path)
    }
}

/// Certification of a witness over the seeded separable battery and the zoo.
/// The caller maps `!report.passed()` to exit code 1.
pub fn cmd_certify(req: &CertifyRequest) -> Result<CertificationReport> {
    let w = req.witness.build()?;
    if req.samples == 0 {
        return Err(Error::config("samples", "needs at least one sample"));
    }
    let settings = CertifySettings {
        samples: req.samples,
        seed: req.seed,
    };
    Ok(certify_witness(&w, &settings, &zoo_members(w.dims())))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SepMaxRequest {
    #[serde(flatten)]
    pub witness: WitnessRef,
    /// An explicit `W^2` (with `dims`) instead of a witness.
    #[serde(default)]
    pub w_squared: Option<ComplexMatrix>,
    #[serde(default)]
    pub settings: SeesawSettings,
}

impl SepMaxRequest {
    pub fn load(path: &Path) -> Result<Self> {
        read_config(path)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SepMaxReport {
    pub witness: Option<String>,
    pub params: Vec<f64>,
    pub result: SepMaxResult,
    pub closed_form: Option<f64>,
    pub reported: Option<f64>,
}

pub fn cmd_sepmax(req: &SepMaxRequest) -> Result<SepMaxReport> {
    if let Some(m) = &req.w_squared {
        if req.witness.witness.is_some() || req.witness.matrix.is_some() {
            return Err(Error::config("w_squared", "give either a witness or w_squared"));
        }
        let dims = req.witness.dims_or_config()?;
        return Ok(SepMaxReport {
            witness: None,
            params: Vec::new(),
            result: seesaw_max(m, dims, &req.settings)?,
            closed_form: None,
            reported: None,
        });
    }
    let w = req.witness.build()?;
    let closed_form = match w.family() {
        "wl_p" => Some(closed_form_wlp(w.params()[0])?),
        _ => None,
    };
    let reported = (w.family() == "wl_c").then_some(WLC_REPORTED_MAX);
    Ok(SepMaxReport {
        witness: Some(w.family().to_string()),
        params: w.params().to_vec(),
        result: seesaw_max(&w.squared(), w.dims(), &req.settings)?,
        closed_form,
        reported,
    })
}

/// Which operator built from the witness to expand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecomposeTarget {
    #[default]
    Witness,
    Squared,
    /// `W^2/n + n/(n+1) W`, the first nonlinear witness without `-k I`.
    Wnl1Static,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecomposeRequest {
    #[serde(flatten)]
    pub witness: WitnessRef,
    /// An arbitrary Hermitian operator (with `dims`) instead of a witness.
    #[serde(default)]
    pub operator: Option<ComplexMatrix>,
    #[serde(default)]
    pub target: DecomposeTarget,
}

impl DecomposeRequest {
    pub fn load(path: &Path) -> Result<Self> {
        read_config(path)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecomposeReport {
    pub result: DecompositionResult,
    /// Disagreements with published tables for the same witness parameters.
    pub errata: Vec<Erratum>,
}

pub fn cmd_decompose(req: &DecomposeRequest) -> Result<DecomposeReport> {
    if let Some(m) = &req.operator {
        let dims = req.witness.dims_or_config()?;
        return Ok(DecomposeReport {
            result: decompose(m, dims)?,
            errata: Vec::new(),
        });
    }
    let w = req.witness.build()?;
    let h = match req.target {
        DecomposeTarget::Witness => w.matrix().clone(),
        DecomposeTarget::Squared => w.squared(),
        DecomposeTarget::Wnl1Static => wnl1_static_operator(&w),
    };
    let p = if w.family() == "wl_p" { w.params()[0] } else { 1.0 };
    let wanted = match (w.family(), req.target) {
        ("wl_p", DecomposeTarget::Witness) => Some("wl_p"),
        ("wl_p", DecomposeTarget::Squared) => Some("wl_p_squared"),
        ("wl_p", DecomposeTarget::Wnl1Static) => Some("wnl1_wl_p"),
        ("wl_c", DecomposeTarget::Witness) => Some("wl_c"),
        ("wl_c", DecomposeTarget::Wnl1Static) => Some("wnl1_wl_c"),
        _ => None,
    };
    let errata = match wanted {
        Some(t) => errata(p)?.into_iter().filter(|e| e.table == t).collect(),
        None => Vec::new(),
    };
    Ok(DecomposeReport {
        result: decompose(&h, w.dims())?,
        errata,
    })
}
