//! One function per pipeline stage. Stages talk to each other only through
//! the files they leave in the output directory.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hiflab_core::detector::run_detector;
use hiflab_core::evaluation::{
    build_dataset, corpus_specs, cross_validate, evaluate_metrics, fit_classifier, specs_digest, sweep_importance,
    ClassifierKind, Dataset, Metrics, SweepDimension, SweepResult,
};
use hiflab_core::extraction::{assemble_features, channel_manifest, FeatureMatrix};
use hiflab_core::ranking::{rank_and_select, FaultGroup, MdlReport, Stratum};
use hiflab_core::signalgen::{synth_event, Label, ScenarioSpec, SignalRecord};
use hiflab_core::{digest, seed, Settings};

use crate::config;
use crate::error::{CliError, CliResult};
use crate::output::{read_text, strip_comments, Outputs};

pub const CATALOG: &str = "catalog.jsonl";
pub const HOLDOUT: &str = "holdout.jsonl";
pub const FEATURES: &str = "features.csv";
pub const HOLDOUT_FEATURES: &str = "holdout_features.csv";
pub const CHANNELS: &str = "channels.csv";
pub const REPORT: &str = "mdl_report.toml";
pub const SCORES: &str = "mdl_scores.csv";
pub const DETECTIONS: &str = "detections.jsonl";
pub const DETECTION: &str = "detection.toml";
pub const EVALUATION: &str = "evaluation.toml";
pub const METRICS: &str = "metrics.csv";
pub const RUN: &str = "run.toml";

pub fn sweep_table(dim: SweepDimension) -> String {
    format!("sweep_{dim}.csv")
}

pub fn sweep_file(dim: SweepDimension) -> String {
    format!("sweep_{dim}.toml")
}

/// Settings plus the artifact sink of one command.
pub struct Ctx {
    pub settings: Settings,
    pub out: Outputs,
}

impl Ctx {
    fn input(&self, explicit: Option<&Path>, default: &str) -> PathBuf {
        explicit.map(Path::to_path_buf).unwrap_or_else(|| self.out.path(default))
    }
}

pub fn write_manifest(ctx: &mut Ctx) -> CliResult<()> {
    let body = config::dump(&ctx.settings)?;
    ctx.out.write(RUN, &body)?;
    Ok(())
}

fn specs_jsonl(specs: &[ScenarioSpec]) -> CliResult<String> {
    let mut s = String::new();
    for spec in specs {
        s.push_str(&serde_json::to_string(spec).map_err(|e| CliError::Internal(e.to_string()))?);
        s.push('\n');
    }
    Ok(s)
}

/// Scenario list in file order.
pub fn read_specs(path: &Path) -> CliResult<Vec<ScenarioSpec>> {
    let text = read_text(path)?;
    let mut specs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let spec: ScenarioSpec = serde_json::from_str(line)
            .map_err(|e| CliError::Data(format!("{}: line {}: {e}", path.display(), n + 1)))?;
        spec.validate()?;
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(CliError::Data(format!("{}: no scenarios", path.display())));
    }
    Ok(specs)
}

fn record_name(index: usize, spec: &ScenarioSpec) -> String {
    format!("{index:04}_{}", spec.tag())
}

// simulate ------------------------------------------------------------------

pub fn simulate(ctx: &mut Ctx, waveforms: usize) -> CliResult<String> {
    let s = &ctx.settings;
    let train = corpus_specs(&s.corpus)?;
    let test = corpus_specs(&s.holdout_corpus())?;
    let (train_body, test_body) = (specs_jsonl(&train)?, specs_jsonl(&test)?);
    ctx.out.write(CATALOG, &train_body)?;
    ctx.out.write(HOLDOUT, &test_body)?;
    let n = waveforms.min(train.len());
    let grid = s.grid.clone();
    let records: Vec<SignalRecord> =
        train[..n].par_iter().map(|spec| synth_event(spec, &grid)).collect::<hiflab_core::Result<_>>()?;
    for (i, rec) in records.iter().enumerate() {
        let base = format!("records/{}", record_name(i, &rec.spec));
        ctx.out.write(&format!("{base}.csv"), &rec.to_csv())?;
        ctx.out.write(&format!("{base}.toml"), &rec.sidecar_toml()?)?;
    }
    Ok(format!(
        "simulate: {} training and {} holdout scenarios, {n} waveform records",
        train.len(),
        test.len()
    ))
}

// extract -------------------------------------------------------------------

pub fn extract(ctx: &mut Ctx, catalog: Option<&Path>, record: Option<&Path>) -> CliResult<String> {
    let s = ctx.settings.clone();
    if let Some(path) = record {
        let rec = SignalRecord::read(path)?;
        let m = assemble_features(&rec, &s.extraction)?;
        ctx.out.write("windows.csv", &m.to_csv())?;
        ctx.out.write(CHANNELS, &m.manifest_csv())?;
        return Ok(format!("extract: {} windows x {} channels from {}", m.len(), m.channels.len(), path.display()));
    }
    let path = ctx.input(catalog, CATALOG);
    let specs = read_specs(&path)?;
    let ds = build_dataset(&specs, &s.grid, &s.extraction, s.aggregation)?;
    ctx.out.write(FEATURES, &ds.matrix.to_csv())?;
    ctx.out.write(CHANNELS, &ds.matrix.manifest_csv())?;
    let mut msg = format!("extract: {} events x {} channels", ds.len(), ds.matrix.channels.len());
    let holdout = path.with_file_name(HOLDOUT);
    if catalog.is_none() && holdout.exists() {
        let test = build_dataset(&read_specs(&holdout)?, &s.grid, &s.extraction, s.aggregation)?;
        ctx.out.write(HOLDOUT_FEATURES, &test.matrix.to_csv())?;
        let _ = write!(msg, ", {} holdout events", test.len());
    }
    Ok(msg)
}

fn read_features(path: &Path, settings: &Settings) -> CliResult<FeatureMatrix> {
    let text = read_text(path)?;
    let header = text.lines().find(|l| !l.starts_with('#') && !l.trim().is_empty()).unwrap_or("");
    if header.rsplit(',').next() != Some("label") {
        return Err(CliError::Usage(format!("{}: feature table has no `label` column", path.display())));
    }
    let kinds = channel_manifest(&settings.extraction);
    Ok(FeatureMatrix::from_csv(&text, path, Some(&kinds))?)
}

// rank ----------------------------------------------------------------------

pub fn rank(ctx: &mut Ctx, features: Option<&Path>, catalog: Option<&Path>) -> CliResult<String> {
    let s = ctx.settings.clone();
    let m = read_features(&ctx.input(features, FEATURES), &s)?;
    let cat_path = ctx.input(catalog, CATALOG);
    let specs = if cat_path.exists() { read_specs(&cat_path)? } else { Vec::new() };
    let strata = if specs.len() == m.len() {
        Dataset { matrix: m.clone(), digest: specs_digest(&specs), specs }.strata()
    } else {
        vec![Stratum { group: FaultGroup::Unbalanced, system: "all".into(), rows: (0..m.len()).collect() }]
    };
    let report = rank_and_select(&m, &strata, &s.rank)?;
    ctx.out.write(REPORT, &report.to_toml())?;
    ctx.out.write(SCORES, &report.to_csv())?;
    let efs = report.efs.get(&FaultGroup::Unbalanced).map(|v| v.join(", ")).unwrap_or_default();
    Ok(format!("rank: {} channels over {} events; unbalanced EFS [{efs}]", report.channels.len(), report.instances))
}

// detect --------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectionLine {
    pub index: usize,
    pub tag: String,
    pub label: Label,
    pub tripped: bool,
    pub detection_time: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectionReport {
    pub records: usize,
    pub metrics: Metrics,
    /// Mean detection time over tripped HIF records, seconds.
    pub mean_detection_time: Option<f64>,
    pub capacitor_records: usize,
    pub capacitor_trips: usize,
    pub time_scale: f64,
    pub detector_digest: String,
}

pub fn detect(ctx: &mut Ctx, catalog: Option<&Path>, traces: usize) -> CliResult<String> {
    let s = ctx.settings.clone();
    let specs = read_specs(&ctx.input(catalog, CATALOG))?;
    let results: Vec<_> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let rec = synth_event(spec, &s.grid)?;
            let r = run_detector(&rec, &s.detector)?;
            let trace = (i < traces).then(|| r.trace_csv());
            Ok((r.tripped, r.detection_time, trace))
        })
        .collect::<hiflab_core::Result<_>>()?;
    let mut lines = String::new();
    let (mut truth, mut pred) = (Vec::new(), Vec::new());
    let (mut cap, mut cap_trips, mut times) = (0, 0, Vec::new());
    for (i, (spec, (tripped, dt, trace))) in specs.iter().zip(results).enumerate() {
        let label = if spec.is_fault() { Label::Hif } else { Label::NonHif };
        let line = DetectionLine { index: i, tag: spec.tag(), label, tripped, detection_time: dt };
        lines.push_str(&serde_json::to_string(&line).map_err(|e| CliError::Internal(e.to_string()))?);
        lines.push('\n');
        truth.push(label);
        pred.push(if tripped { Label::Hif } else { Label::NonHif });
        if matches!(spec.event_class, hiflab_core::signalgen::EventClass::CapacitorSwitch { .. }) {
            cap += 1;
            cap_trips += usize::from(tripped);
        }
        if let (true, Some(t)) = (label.is_hif() && tripped, dt) {
            times.push(t);
        }
        if let Some(trace) = trace {
            ctx.out.write(&format!("traces/{}.csv", record_name(i, spec)), &trace)?;
        }
    }
    let report = DetectionReport {
        records: specs.len(),
        metrics: Metrics::of(&truth, &pred),
        mean_detection_time: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
        capacitor_records: cap,
        capacitor_trips: cap_trips,
        time_scale: s.detector.time_scale,
        detector_digest: digest::of_json(&s.detector),
    };
    ctx.out.write(DETECTIONS, &lines)?;
    ctx.out.write(DETECTION, &to_toml(&report)?)?;
    Ok(format!(
        "detect: {} records, DI {:.1}%, SI {:.1}%, {cap_trips}/{cap} capacitor-switching trips",
        report.records, report.metrics.di, report.metrics.si
    ))
}

// evaluate ------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSummary {
    pub kind: ClassifierKind,
    /// Mean over seeds of the per-seed mean fold accuracy, percent.
    pub cv_accuracy: f64,
    /// Spread of the per-seed accuracies.
    pub cv_accuracy_std: f64,
    pub cv_di: f64,
    pub cv_si: f64,
    pub per_seed_accuracy: Vec<f64>,
    pub synthetic_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub holdout: Option<Metrics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub features: Vec<String>,
    pub events: usize,
    pub folds: usize,
    pub seeds: Vec<u64>,
    pub classifiers: Vec<ClassifierSummary>,
}

impl EvaluationReport {
    /// `classifier,cv_accuracy,...` table, one bar group per classifier.
    pub fn metric_bar_csv(&self) -> String {
        let mut s = String::from("classifier,cv_accuracy,cv_accuracy_std,cv_di,cv_si,holdout_accuracy,holdout_di,holdout_si\n");
        for c in &self.classifiers {
            let _ = write!(s, "{},{},{},{},{}", c.kind, c.cv_accuracy, c.cv_accuracy_std, c.cv_di, c.cv_si);
            match &c.holdout {
                Some(h) => {
                    let _ = writeln!(s, ",{},{},{}", h.accuracy, h.di, h.si);
                }
                None => s.push_str(",,,\n"),
            }
        }
        s
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
    (m, v.sqrt())
}

fn efs_of(report: &MdlReport, k: usize) -> Vec<String> {
    report
        .efs
        .get(&FaultGroup::Unbalanced)
        .cloned()
        .unwrap_or_else(|| report.ranked_names().into_iter().take(k).map(str::to_string).collect())
}

fn select(m: &FeatureMatrix, names: &[String]) -> CliResult<Vec<Vec<f64>>> {
    let idx: Vec<usize> = names
        .iter()
        .map(|n| m.channel_index(n).ok_or_else(|| CliError::Data(format!("feature table lacks channel {n}"))))
        .collect::<CliResult<_>>()?;
    Ok(m.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect())
}

pub fn evaluate_report(settings: &Settings, train: &FeatureMatrix, test: Option<&FeatureMatrix>, features: Vec<String>) -> CliResult<EvaluationReport> {
    let x = select(train, &features)?;
    let seeds: Vec<u64> = (0..settings.cv_seeds as u64).map(|k| seed::derive(settings.seed, k)).collect();
    let test_x = test.map(|t| select(t, &features)).transpose()?;
    let classifiers = settings
        .classifiers
        .par_iter()
        .map(|&kind| -> CliResult<ClassifierSummary> {
            let runs = seeds
                .iter()
                .map(|&sd| cross_validate(kind, &x, &train.labels, &settings.cv, sd))
                .collect::<hiflab_core::Result<Vec<_>>>()?;
            let accs: Vec<f64> = runs.iter().map(|r| r.mean_accuracy).collect();
            let (cv_accuracy, cv_accuracy_std) = mean_std(&accs);
            let holdout = match (&test_x, test) {
                (Some(tx), Some(t)) => {
                    let model = fit_classifier(kind, &x, &train.labels, &settings.cv.hyper, seeds[0])?;
                    Some(evaluate_metrics(&model, tx, &t.labels)?)
                }
                _ => None,
            };
            Ok(ClassifierSummary {
                kind,
                cv_accuracy,
                cv_accuracy_std,
                cv_di: runs.iter().map(|r| r.pooled.di).sum::<f64>() / runs.len() as f64,
                cv_si: runs.iter().map(|r| r.pooled.si).sum::<f64>() / runs.len() as f64,
                per_seed_accuracy: accs,
                synthetic_rows: runs.iter().map(|r| r.synthetic_rows).sum(),
                holdout,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(EvaluationReport { features, events: train.len(), folds: settings.cv.folds, seeds, classifiers })
}

pub fn evaluate(ctx: &mut Ctx, features: Option<&Path>, report: Option<&Path>, holdout: Option<&Path>) -> CliResult<String> {
    let s = ctx.settings.clone();
    let train = read_features(&ctx.input(features, FEATURES), &s)?;
    let rep_path = ctx.input(report, REPORT);
    let rep = MdlReport::from_toml(&read_text(&rep_path)?).map_err(|e| CliError::Data(format!("{}: {e}", rep_path.display())))?;
    let hold_path = ctx.input(holdout, HOLDOUT_FEATURES);
    let test = if holdout.is_some() || hold_path.exists() { Some(read_features(&hold_path, &s)?) } else { None };
    let ev = evaluate_report(&s, &train, test.as_ref(), efs_of(&rep, s.rank.efs_size))?;
    ctx.out.write(EVALUATION, &to_toml(&ev)?)?;
    ctx.out.write(METRICS, &ev.metric_bar_csv())?;
    let mut msg = String::from("evaluate:");
    for c in &ev.classifiers {
        let _ = write!(msg, " {} {:.1}%", c.kind, c.cv_accuracy);
    }
    Ok(msg)
}

// sweep ---------------------------------------------------------------------

/// File form of a sweep; gaps are NaN.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepFile {
    pub dimension: SweepDimension,
    pub grid: Vec<String>,
    pub channels: Vec<String>,
    pub gaps: Vec<String>,
    /// `scores[g][c]`, MDL bits per instance.
    pub scores: Vec<Vec<f64>>,
}

impl From<&SweepResult> for SweepFile {
    fn from(r: &SweepResult) -> Self {
        Self {
            dimension: r.dimension,
            grid: r.grid.clone(),
            channels: r.channels.clone(),
            gaps: r.gaps.clone(),
            scores: r.scores.iter().map(|row| row.iter().map(|v| v.unwrap_or(f64::NAN)).collect()).collect(),
        }
    }
}

impl From<SweepFile> for SweepResult {
    fn from(f: SweepFile) -> Self {
        Self {
            dimension: f.dimension,
            grid: f.grid,
            channels: f.channels,
            gaps: f.gaps,
            scores: f.scores.into_iter().map(|row| row.into_iter().map(|v| (!v.is_nan()).then_some(v)).collect()).collect(),
        }
    }
}

pub fn sweep(ctx: &mut Ctx, dims: &[SweepDimension]) -> CliResult<String> {
    let s = ctx.settings.clone();
    let mut msg = String::from("sweep:");
    for &dim in dims {
        let r = sweep_importance(dim, &s.sweep, &s.grid, &s.extraction)?;
        ctx.out.write(&sweep_table(dim), &r.to_csv())?;
        ctx.out.write(&sweep_file(dim), &to_toml(&SweepFile::from(&r))?)?;
        let _ = write!(msg, " {dim} ({} points, {} gaps)", r.grid.len(), r.gaps.len());
    }
    Ok(msg)
}

pub fn read_sweep(path: &Path) -> CliResult<SweepResult> {
    let f: SweepFile = from_toml(path)?;
    Ok(f.into())
}

// helpers -------------------------------------------------------------------

pub fn to_toml<T: Serialize>(v: &T) -> CliResult<String> {
    toml::to_string(v).map_err(|e| CliError::Internal(format!("serializing: {e}")))
}

pub fn from_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = strip_comments(&read_text(path)?);
    toml::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Every stage in order, with the sweep restricted to `dims`.
pub fn pipeline(ctx: &mut Ctx, dims: &[SweepDimension]) -> CliResult<Vec<String>> {
    write_manifest(ctx)?;
    Ok(vec![
        simulate(ctx, 0)?,
        extract(ctx, None, None)?,
        rank(ctx, None, None)?,
        detect(ctx, None, 0)?,
        evaluate(ctx, None, None, None)?,
        sweep(ctx, dims)?,
    ])
}

/// Per-classifier accuracies keyed by kind, for quick lookups.
pub fn accuracy_by_kind(ev: &EvaluationReport) -> BTreeMap<ClassifierKind, f64> {
    ev.classifiers.iter().map(|c| (c.kind, c.cv_accuracy)).collect()
}
