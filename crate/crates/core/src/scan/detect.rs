use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{AxisOwner, ResolvedSweep, SepMaxMethod, SepMaxSource};
use crate::error::{Error, Result};
use crate::nlew::{evaluate, NlewKind};
use crate::sepmax::{cache_key, closed_form_wlp, SepMaxCache, SeesawSettings};
use crate::states::{make_family_state, ppt_classify, DensityMatrix, PptClass};
use crate::witness::WitnessOperator;

#[derive(Clone, Debug, Serialize)]
pub struct KindValue {
    pub kind: NlewKind,
    pub value: Option<f64>,
    pub detects: bool,
    pub digest: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectionRow {
    pub index: usize,
    pub params: Vec<f64>,
    pub ppt_class: Option<PptClass>,
    pub min_pt_eigenvalue: Option<f64>,
    pub tr_wl: Option<f64>,
    pub values: Vec<KindValue>,
    pub flags: Vec<String>,
}

impl DetectionRow {
    pub fn detects(&self, kind: NlewKind) -> bool {
        self.values.iter().any(|v| v.kind == kind && v.detects)
    }

    pub fn value(&self, kind: NlewKind) -> Option<f64> {
        self.values.iter().find(|v| v.kind == kind).and_then(|v| v.value)
    }
}

/// A detected stretch along one axis. `lo`/`hi` are detected points; the
/// matching `*_outer` values are the undetected side of the bisection
/// bracket, absent where the stretch reaches the end of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_outer: Option<f64>,
    pub hi_outer: Option<f64>,
    /// Both endpoints and the midpoint re-evaluated as detected, and both
    /// outer bracket points as undetected.
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LineIntervals {
    /// Values of the other axes, in axis order with this axis omitted.
    pub fixed: Vec<f64>,
    pub intervals: Vec<Interval>,
}

/// Detection along one axis for one kind. `union` is the refined extent of
/// every detected stretch; `common` holds the values detected on every line
/// of the grid, so `common x (swept ranges of the other axes)` is a cell of
/// detected states. With a single axis both lists are the stretches.
#[derive(Clone, Debug, Serialize)]
pub struct AxisDetection {
    pub kind: NlewKind,
    pub param: String,
    pub union: Vec<Interval>,
    pub common: Vec<(f64, f64)>,
    pub lines: Vec<LineIntervals>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectionSummary {
    pub family: String,
    pub witness: Option<String>,
    pub params: Vec<String>,
    pub kinds: Vec<NlewKind>,
    pub grid_points: usize,
    pub flagged_rows: usize,
    pub sep_max: BTreeMap<String, f64>,
    pub min_tr_wl: Option<f64>,
    pub detections: Vec<AxisDetection>,
}

impl DetectionSummary {
    pub fn axis(&self, kind: NlewKind, param: &str) -> Option<&AxisDetection> {
        self.detections.iter().find(|d| d.kind == kind && d.param == param)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectionReport {
    pub summary: DetectionSummary,
    pub rows: Vec<DetectionRow>,
}

struct Evaluator<'a> {
    sweep: &'a ResolvedSweep,
    sep_max: BTreeMap<String, f64>,
}

impl Evaluator<'_> {
    fn witness(&self, wparams: &[f64]) -> Result<Option<WitnessOperator>> {
        self.sweep.witness.map(|w| w.build(wparams)).transpose()
    }

    fn state(&self, sparams: &[f64]) -> Result<DensityMatrix> {
        make_family_state(self.sweep.family, sparams)
    }

    fn sep_max_for(&self, w: Option<&WitnessOperator>) -> Option<f64> {
        let w = w?;
        self.sep_max.get(&cache_key(w.family(), w.params())).copied()
    }

    fn eval_kind(&self, kind: NlewKind, w: Option<&WitnessOperator>, rho: &DensityMatrix) -> KindValue {
        match evaluate(kind, w, rho, self.sep_max_for(w)) {
            Ok(e) => KindValue {
                kind,
                value: Some(e.value),
                detects: e.detects(),
                digest: Some(e.intermediates.digest()),
                error: None,
            },
            Err(err) => KindValue {
                kind,
                value: None,
                detects: false,
                digest: None,
                error: Some(err.to_string()),
            },
        }
    }

    fn row(&self, index: usize) -> DetectionRow {
        let params = self.sweep.point(index);
        let (sp, wp) = self.sweep.split(&params);
        let mut row = DetectionRow {
            index,
            params: params.clone(),
            ppt_class: None,
            min_pt_eigenvalue: None,
            tr_wl: None,
            values: Vec::new(),
            flags: Vec::new(),
        };
        let rho = match self.state(sp) {
            Ok(r) => r,
            Err(e) => {
                row.flags.push(format!("state: {e}"));
                return row;
            }
        };
        let ppt = ppt_classify(&rho);
        row.ppt_class = Some(ppt.class);
        row.min_pt_eigenvalue = Some(ppt.min_pt_eigenvalue);
        let w = match self.witness(wp) {
            Ok(w) => w,
            Err(e) => {
                row.flags.push(format!("witness: {e}"));
                return row;
            }
        };
        if let Some(w) = &w {
            match w.expectation(&rho) {
                Ok(v) => row.tr_wl = Some(v),
                Err(e) => row.flags.push(format!("tr_wl: {e}")),
            }
        }
        for &k in &self.sweep.config.kinds {
            let v = self.eval_kind(k, w.as_ref(), &rho);
            if let Some(e) = &v.error {
                row.flags.push(format!("{k}: {e}"));
            }
            row.values.push(v);
        }
        row
    }

    fn detects_at(&self, kind: NlewKind, params: &[f64]) -> bool {
        let (sp, wp) = self.sweep.split(params);
        let (Ok(rho), Ok(w)) = (self.state(sp), self.witness(wp)) else {
            return false;
        };
        self.eval_kind(kind, w.as_ref(), &rho).detects
    }

    /// Bisects between a detected and an undetected value of `axis`.
    fn bisect(&self, kind: NlewKind, base: &[f64], axis: usize, mut inside: f64, mut outside: f64) -> (f64, f64) {
        let t = &self.sweep.config.tolerances;
        let mut p = base.to_vec();
        for _ in 0..t.bisection_iterations {
            if (inside - outside).abs() <= t.bisection {
                break;
            }
            let mid = 0.5 * (inside + outside);
            p[axis] = mid;
            if self.detects_at(kind, &p) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        (inside, outside)
    }

    fn verify(&self, kind: NlewKind, base: &[f64], axis: usize, iv: &Interval) -> bool {
        let mut p = base.to_vec();
        let mut at = |x: f64| {
            p[axis] = x;
            self.detects_at(kind, &p)
        };
        at(iv.lo)
            && at(iv.hi)
            && at(0.5 * (iv.lo + iv.hi))
            && iv.lo_outer.is_none_or(|x| !at(x))
            && iv.hi_outer.is_none_or(|x| !at(x))
    }
}

fn grid_index(dims: &[usize], coords: &[usize]) -> usize {
    coords.iter().zip(dims).fold(0, |acc, (&c, &n)| acc * n + c)
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(l1, h1) in a {
        for &(l2, h2) in b {
            let (l, h) = (l1.max(l2), h1.min(h2));
            if l <= h {
                out.push((l, h));
            }
        }
    }
    out
}

fn axis_detection(ev: &Evaluator, rows: &[DetectionRow], kind: NlewKind, axis: usize) -> AxisDetection {
    let sweep = ev.sweep;
    let dims: Vec<usize> = sweep.axes.iter().map(|a| a.values.len()).collect();
    let vals = &sweep.axes[axis].values;
    let n_lines: usize = dims.iter().enumerate().filter(|&(k, _)| k != axis).map(|(_, &n)| n).product();

    let lines: Vec<LineIntervals> = (0..n_lines)
        .into_par_iter()
        .map(|line| {
            let mut coords = vec![0usize; dims.len()];
            let mut rest = line;
            for k in (0..dims.len()).rev() {
                if k != axis {
                    coords[k] = rest % dims[k];
                    rest /= dims[k];
                }
            }
            let hit: Vec<bool> = (0..vals.len())
                .map(|i| {
                    coords[axis] = i;
                    rows[grid_index(&dims, &coords)].detects(kind)
                })
                .collect();
            coords[axis] = 0;
            let base = sweep.point(grid_index(&dims, &coords));
            let mut intervals = Vec::new();
            let mut i = 0;
            while i < hit.len() {
                if !hit[i] {
                    i += 1;
                    continue;
                }
                let start = i;
                while i + 1 < hit.len() && hit[i + 1] {
                    i += 1;
                }
                let end = i;
                let (lo, lo_outer) = if start == 0 {
                    (vals[0], None)
                } else {
                    let (a, b) = ev.bisect(kind, &base, axis, vals[start], vals[start - 1]);
                    (a, Some(b))
                };
                let (hi, hi_outer) = if end + 1 == hit.len() {
                    (vals[end], None)
                } else {
                    let (a, b) = ev.bisect(kind, &base, axis, vals[end], vals[end + 1]);
                    (a, Some(b))
                };
                let mut iv = Interval { lo, hi, lo_outer, hi_outer, verified: false };
                iv.verified = ev.verify(kind, &base, axis, &iv);
                intervals.push(iv);
                i += 1;
            }
            let fixed = base
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != axis)
                .map(|(_, &x)| x)
                .collect();
            LineIntervals { fixed, intervals }
        })
        .collect();

    let all: Vec<&Interval> = lines.iter().flat_map(|l| &l.intervals).collect();
    let union = if n_lines == 1 {
        lines[0].intervals.clone()
    } else if all.is_empty() {
        Vec::new()
    } else {
        let lo = all.iter().min_by(|a, b| a.lo.total_cmp(&b.lo)).unwrap();
        let hi = all.iter().max_by(|a, b| a.hi.total_cmp(&b.hi)).unwrap();
        vec![Interval {
            lo: lo.lo,
            hi: hi.hi,
            lo_outer: lo.lo_outer,
            hi_outer: hi.hi_outer,
            verified: lo.verified && hi.verified,
        }]
    };
    let mut common: Vec<(f64, f64)> = vec![(f64::NEG_INFINITY, f64::INFINITY)];
    for l in &lines {
        let set: Vec<(f64, f64)> = l.intervals.iter().map(|iv| (iv.lo, iv.hi)).collect();
        common = intersect(&common, &set);
    }
    AxisDetection {
        kind,
        param: sweep.axes[axis].name.clone(),
        union,
        common,
        lines,
    }
}

fn resolve_sep_max(sweep: &ResolvedSweep) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    let cfg = &sweep.config;
    if !cfg.kinds.contains(&NlewKind::Wnl4) {
        return Ok(out);
    }
    let wf = sweep.witness.ok_or_else(|| Error::config("witness", "WNL4 needs a linear witness"))?;
    let waxes: Vec<&Vec<f64>> = sweep
        .axes
        .iter()
        .filter(|a| a.owner == AxisOwner::Witness)
        .map(|a| &a.values)
        .collect();
    let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
    for vals in waxes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                vals.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    let mut cache = match &cfg.output.sepmax_cache {
        Some(p) => SepMaxCache::open(p)?,
        None => SepMaxCache::in_memory(),
    };
    let settings = cfg.seesaw.clone().unwrap_or(SeesawSettings {
        seed: cfg.seed,
        ..Default::default()
    });
    for params in combos {
        let key = cache_key(wf.id(), &params);
        let v = match cfg.sep_max.as_ref().expect("checked by resolve") {
            SepMaxSource::Value(v) => *v,
            SepMaxSource::Method(SepMaxMethod::ClosedForm) => closed_form_wlp(params[0])?,
            SepMaxSource::Method(SepMaxMethod::Seesaw) => {
                cache.get_or_solve(&wf.build(&params)?, &settings)?
            }
        };
        out.insert(key, v);
    }
    cache.save()?;
    Ok(out)
}

/// Evaluates the whole grid and extracts refined detection intervals.
pub fn run_sweep(sweep: &ResolvedSweep) -> Result<DetectionReport> {
    let ev = Evaluator {
        sweep,
        sep_max: resolve_sep_max(sweep)?,
    };
    let rows: Vec<DetectionRow> = (0..sweep.grid_len()).into_par_iter().map(|i| ev.row(i)).collect();
    let mut detections = Vec::new();
    for &kind in &sweep.config.kinds {
        for axis in 0..sweep.axes.len() {
            if sweep.axes[axis].values.len() > 1 || sweep.axes.iter().all(|a| a.values.len() == 1) {
                detections.push(axis_detection(&ev, &rows, kind, axis));
            }
        }
    }
    let min_tr_wl = rows.iter().filter_map(|r| r.tr_wl).reduce(f64::min);
    let summary = DetectionSummary {
        family: sweep.family.id().to_string(),
        witness: sweep.witness.map(|w| w.id().to_string()),
        params: sweep.param_names(),
        kinds: sweep.config.kinds.clone(),
        grid_points: rows.len(),
        flagged_rows: rows.iter().filter(|r| !r.flags.is_empty()).count(),
        sep_max: ev.sep_max,
        min_tr_wl,
        detections,
    };
    Ok(DetectionReport { summary, rows })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// Columns: `family`, one per parameter, `ppt_class`, `tr_wl`, one per kind,
/// `digest_<kind>` per kind, `flags`.
pub fn write_rows_csv<W: Write>(report: &DetectionReport, out: W) -> Result<()> {
    let s = &report.summary;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = vec!["family".into()];
    header.extend(s.params.iter().cloned());
    header.push("ppt_class".into());
    header.push("tr_wl".into());
    header.extend(s.kinds.iter().map(|k| k.name().to_string()));
    header.extend(s.kinds.iter().map(|k| format!("digest_{}", k.name())));
    header.push("flags".into());
    w.write_record(&header)?;
    for r in &report.rows {
        let mut rec: Vec<String> = vec![s.family.clone()];
        rec.extend(r.params.iter().map(|p| p.to_string()));
        rec.push(r.ppt_class.map(|c| c.to_string()).unwrap_or_default());
        rec.push(opt(r.tr_wl));
        for k in &s.kinds {
            rec.push(opt(r.value(*k)));
        }
        for k in &s.kinds {
            rec.push(
                r.values
                    .iter()
                    .find(|v| v.kind == *k)
                    .and_then(|v| v.digest.clone())
                    .unwrap_or_default(),
            );
        }
        rec.push(r.flags.join("; "));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct IntervalRecord<'a> {
    kind: &'a str,
    param: &'a str,
    scope: &'a str,
    lo: f64,
    hi: f64,
    verified: bool,
}

/// One line per extracted interval: `kind,param,scope,lo,hi,verified`,
/// where `scope` is `union` or `common`.
pub fn write_intervals_csv<W: Write>(summary: &DetectionSummary, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["kind", "param", "scope", "lo", "hi", "verified"])?;
    for d in &summary.detections {
        for iv in &d.union {
            w.serialize(IntervalRecord {
                kind: d.kind.name(),
                param: &d.param,
                scope: "union",
                lo: iv.lo,
                hi: iv.hi,
                verified: iv.verified,
            })?;
        }
        for &(lo, hi) in &d.common {
            w.serialize(IntervalRecord {
                kind: d.kind.name(),
                param: &d.param,
                scope: "common",
                lo,
                hi,
                verified: true,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
