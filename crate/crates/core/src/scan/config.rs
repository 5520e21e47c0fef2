use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nlew::NlewKind;
use crate::sepmax::SeesawSettings;
use crate::states::{StateFamily, DEFAULT_SEED};
use crate::witness::WitnessFamily;

pub const DEFAULT_POINTS: usize = 200;
pub const DEFAULT_BISECTION_ITERATIONS: usize = 40;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-4;

/// One swept or fixed parameter. A grid given without `step` uses `points`
/// evenly spaced values including both ends (200 by default).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamAxis {
    Fixed(f64),
    Grid {
        start: f64,
        stop: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<usize>,
    },
}

impl ParamAxis {
    pub fn values(&self, field: &str) -> Result<Vec<f64>> {
        match *self {
            ParamAxis::Fixed(x) => {
                if !x.is_finite() {
                    return Err(Error::config(field, "value must be finite"));
                }
                Ok(vec![x])
            }
            ParamAxis::Grid { start, stop, step, points } => {
                if !(start.is_finite() && stop.is_finite()) || stop < start {
                    return Err(Error::config(field, "grid needs finite start <= stop"));
                }
                let n = match (step, points) {
                    (Some(_), Some(_)) => {
                        return Err(Error::config(field, "give either step or points, not both"))
                    }
                    (Some(s), None) => {
                        if !(s > 0.0 && s.is_finite()) {
                            return Err(Error::config(field, "step must be > 0"));
                        }
                        ((stop - start) / s + 1e-9).floor() as usize + 1
                    }
                    (None, p) => p.unwrap_or(DEFAULT_POINTS),
                };
                if n == 0 {
                    return Err(Error::config(field, "grid is empty"));
                }
                if n == 1 {
                    return Ok(vec![start]);
                }
                let h = match step {
                    Some(s) => s,
                    None => (stop - start) / (n - 1) as f64,
                };
                Ok((0..n)
                    .map(|i| if i + 1 == n && step.is_none() { stop } else { start + h * i as f64 })
                    .collect())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamAxis>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamAxis>,
}

/// Where WNL4 takes `max Tr(W^2 rho_sep)` from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SepMaxSource {
    Value(f64),
    Method(SepMaxMethod),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SepMaxMethod {
    Seesaw,
    ClosedForm,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub bisection: f64,
    pub bisection_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            bisection: DEFAULT_BISECTION_TOL,
            bisection_iterations: DEFAULT_BISECTION_ITERATIONS,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub sepmax_cache: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub state: StateConfig,
    #[serde(default)]
    pub witness: Option<WitnessConfig>,
    pub kinds: Vec<NlewKind>,
    #[serde(default)]
    pub sep_max: Option<SepMaxSource>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seesaw: Option<SeesawSettings>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Whether an axis belongs to the state or to the witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisOwner {
    State,
    Witness,
}

#[derive(Clone, Debug, Serialize)]
pub struct Axis {
    pub name: String,
    pub owner: AxisOwner,
    pub values: Vec<f64>,
}

/// A checked configuration with its grid axes expanded: state parameters in
/// registry order, then witness parameters.
#[derive(Clone, Debug)]
pub struct ResolvedSweep {
    pub config: SweepConfig,
    pub family: StateFamily,
    pub witness: Option<WitnessFamily>,
    pub axes: Vec<Axis>,
}

impl ResolvedSweep {
    pub fn grid_len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Grid point `index`, row-major with the last axis fastest.
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            let n = a.values.len();
            out[k] = a.values[index % n];
            index /= n;
        }
        out
    }

    pub fn split<'a>(&self, point: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        let ns = self.axes.iter().filter(|a| a.owner == AxisOwner::State).count();
        point.split_at(ns)
    }

    pub fn param_names(&self) -> Vec<String> {
        self.axes.iter().map(|a| a.name.clone()).collect()
    }
}

fn expand_axes(
    owner: AxisOwner,
    prefix: &str,
    names: &[String],
    given: &BTreeMap<String, ParamAxis>,
) -> Result<Vec<Axis>> {
    for k in given.keys() {
        if !names.contains(k) {
            return Err(Error::config(
                format!("{prefix}.params.{k}"),
                format!("unknown parameter; expected one of [{}]", names.join(", ")),
            ));
        }
    }
    names
        .iter()
        .map(|n| {
            let field = format!("{prefix}.params.{n}");
            let axis = given
                .get(n)
                .ok_or_else(|| Error::config(&field, "missing parameter"))?;
            Ok(Axis {
                name: n.clone(),
                owner,
                values: axis.values(&field)?,
            })
        })
        .collect()
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn resolve(&self) -> Result<ResolvedSweep> {
        let family: StateFamily = self
            .state
            .family
            .parse()
            .map_err(|e: Error| Error::config("state.family", e.to_string()))?;
        let mut axes = expand_axes(
            AxisOwner::State,
            "state",
            &family.param_names(),
            &self.state.params,
        )?;
        let witness = match &self.witness {
            None => None,
            Some(w) => {
                let wf: WitnessFamily = w
                    .family
                    .parse()
                    .map_err(|e: Error| Error::config("witness.family", e.to_string()))?;
                if wf.dims() != family.dims() {
                    return Err(Error::config(
                        "witness.family",
                        format!("witness acts on {} but the state family on {}", wf.dims(), family.dims()),
                    ));
                }
                let waxes = expand_axes(AxisOwner::Witness, "witness", &wf.param_names(), &w.params)?;
                for a in &waxes {
                    if axes.iter().any(|s| s.name == a.name) {
                        return Err(Error::config(
                            format!("witness.params.{}", a.name),
                            "name clashes with a state parameter",
                        ));
                    }
                }
                axes.extend(waxes);
                Some(wf)
            }
        };
        if self.kinds.is_empty() {
            return Err(Error::config("kinds", "list at least one NLEW kind"));
        }
        for k in &self.kinds {
            if k.needs_witness() && witness.is_none() {
                return Err(Error::config("witness", format!("{k} needs a linear witness")));
            }
            if !k.needs_witness() && !family.dims().is_symmetric() {
                return Err(Error::config(
                    "kinds",
                    format!("{k} needs a d x d state family, got {}", family.dims()),
                ));
            }
        }
        if self.kinds.contains(&NlewKind::Wnl4) {
            match &self.sep_max {
                None => return Err(Error::config("sep_max", "WNL4 needs sep_max")),
                Some(SepMaxSource::Value(v)) if !v.is_finite() => {
                    return Err(Error::config("sep_max", "value must be finite"))
                }
                Some(SepMaxSource::Method(SepMaxMethod::ClosedForm))
                    if witness != Some(WitnessFamily::WlP) =>
                {
                    return Err(Error::config("sep_max", "a closed form is known only for wl_p"))
                }
                _ => {}
            }
        }
        let t = &self.tolerances;
        if !(t.bisection > 0.0) || t.bisection_iterations == 0 {
            return Err(Error::config("tolerances", "bisection tolerance and iterations must be positive"));
        }
        let resolved = ResolvedSweep {
            config: self.clone(),
            family,
            witness,
            axes,
        };
        if resolved.grid_len() == 0 {
            return Err(Error::config("state.params", "grid is empty"));
        }
        Ok(resolved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<ResolvedSweep> {
        SweepConfig::from_json(text)?.resolve()
    }

    #[test]
    fn grid_by_step_and_points() {
        let a = ParamAxis::Grid { start: 0.0, stop: 1.0, step: Some(0.25), points: None };
        assert_eq!(a.values("x").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let b = ParamAxis::Grid { start: 0.0, stop: 1.0, step: None, points: None };
        let v = b.values("x").unwrap();
        assert_eq!(v.len(), DEFAULT_POINTS);
        assert_eq!(*v.last().unwrap(), 1.0);
        let bad = ParamAxis::Grid { start: 0.0, stop: 1.0, step: Some(0.0), points: None };
        assert!(bad.values("x").is_err());
    }

    #[test]
    fn resolves_axes_in_order() {
        let r = cfg(r#"{"state":{"family":"rho_a","params":{"a":{"start":0.9,"stop":1.0,"points":3}}},
                "witness":{"family":"wl_p","params":{"p":0.01}},"kinds":["WNL2"]}"#)
        .unwrap();
        assert_eq!(r.param_names(), ["a", "p"]);
        assert_eq!(r.grid_len(), 3);
        assert_eq!(r.point(2), vec![1.0, 0.01]);
    }

    #[test]
    fn field_names_in_errors() {
        let e = |t: &str| match cfg(t) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(e(r#"{"state":{"family":"nope"},"kinds":["CCNR_L"]}"#), "state.family");
        assert_eq!(e(r#"{"state":{"family":"rho1"},"kinds":["WNL1"]}"#), "witness");
        assert_eq!(
            e(r#"{"state":{"family":"rho_a","params":{"a":{"start":1,"stop":0}}},"kinds":["CCNR_L"]}"#),
            "state.params.a"
        );
        assert_eq!(
            e(r#"{"state":{"family":"rho_x","params":{"x":1}},"witness":{"family":"wl_c"},"kinds":["WNL4"]}"#),
            "sep_max"
        );
        assert_eq!(
            e(r#"{"state":{"family":"rho_b","params":{"b":0.5}},"kinds":["CCNR_L"]}"#),
            "kinds"
        );
        assert_eq!(e(r#"{"state":{"family":"rho1"},"kinds":["CCNR_L"],"bogus":1}"#), "config");
    }
}
