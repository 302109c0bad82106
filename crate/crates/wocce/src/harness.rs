//! Experiment orchestration: multi-run evaluation of the ensemble against
//! ground truth, baseline comparisons, threshold sweeps, and report
//! emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::base::{
    hierarchical, kmeans, subtractive, DistanceMetric, Partition,
    RosterEntry,
};
use crate::base::fuzzy_cmeans;
use crate::crowd::{build_crowd, AdmissionRecord, ThresholdConfig};
use crate::consensus::wocce_consensus;
use crate::dataset::{generate_half_ring, load_csv, zscore_normalize, Dataset};
use crate::error::{Result, WocceError};
use crate::linkage::LinkageMethod;
use crate::metrics::{accuracy, nmi};

/// Built-in half-ring dataset parameters: a fixed instance so the name
/// always refers to the same data.
pub const HALF_RING_N: usize = 400;
pub const HALF_RING_NOISE: f64 = 0.15;
pub const HALF_RING_SEED: u64 = 25;

/// Where the samples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetRef {
    /// Labeled CSV on disk (last column is the class).
    Path(PathBuf),
    /// A generated half-ring instance; `halfring` alone uses the built-in
    /// constants, `halfring:n:noise:seed` overrides them.
    HalfRing { n: usize, noise: f64, seed: u64 },
}

impl DatasetRef {
    pub fn half_ring() -> Self {
        DatasetRef::HalfRing {
            n: HALF_RING_N,
            noise: HALF_RING_NOISE,
            seed: HALF_RING_SEED,
        }
    }

    pub fn parse(spec: &str) -> Self {
        let lower = spec.to_ascii_lowercase();
        if lower == "halfring" {
            return DatasetRef::half_ring();
        }
        if let Some(rest) = lower.strip_prefix("halfring:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let n = parts
                .first()
                .and_then(|p| p.parse().ok())
                .unwrap_or(HALF_RING_N);
            let noise = parts
                .get(1)
                .and_then(|p| p.parse().ok())
                .unwrap_or(HALF_RING_NOISE);
            let seed = parts
                .get(2)
                .and_then(|p| p.parse().ok())
                .unwrap_or(HALF_RING_SEED);
            return DatasetRef::HalfRing { n, noise, seed };
        }
        DatasetRef::Path(PathBuf::from(spec))
    }
}

/// Loads and optionally z-scores the referenced dataset.
pub fn resolve_dataset(reference: &DatasetRef, normalize: bool) -> Result<Dataset> {
    let ds = match reference {
        DatasetRef::Path(path) => load_csv(path, true)?,
        DatasetRef::HalfRing { n, noise, seed } => generate_half_ring(*n, *noise, *seed)?,
    };
    Ok(if normalize { zscore_normalize(&ds) } else { ds })
}

/// Single-algorithm and ensemble baselines comparable against the main run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    KMeans,
    Fcm,
    Subtractive,
    SingleLinkage,
    Eac,
}

impl Baseline {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "kmeans" => Ok(Baseline::KMeans),
            "fcm" => Ok(Baseline::Fcm),
            "subtractive" => Ok(Baseline::Subtractive),
            "single_linkage" => Ok(Baseline::SingleLinkage),
            "eac" => Ok(Baseline::Eac),
            other => Err(WocceError::Config(format!("unknown baseline {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::KMeans => "kmeans",
            Baseline::Fcm => "fcm",
            Baseline::Subtractive => "subtractive",
            Baseline::SingleLinkage => "single_linkage",
            Baseline::Eac => "eac",
        }
    }
}

pub fn parse_baselines(list: &str) -> Result<Vec<Baseline>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Baseline::parse)
        .collect()
}

/// Which threshold a sweep varies; the others are disabled (0 for the
/// score thresholds, 1 for decentralization).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    It,
    Dt,
    Ct,
}

impl SweepVariable {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "it" => Ok(SweepVariable::It),
            "dt" => Ok(SweepVariable::Dt),
            "ct" => Ok(SweepVariable::Ct),
            other => Err(WocceError::Config(format!(
                "unknown sweep variable {other:?} (expected it, dt, or ct)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub vary: SweepVariable,
    pub grid: Vec<f64>,
}

impl SweepSpec {
    /// Parses an inclusive `start:stop:step` grid.
    pub fn parse(vary: &str, grid: &str) -> Result<Self> {
        let vary = SweepVariable::parse(vary)?;
        let parts: Vec<&str> = grid.split(':').collect();
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| WocceError::Config(format!("bad grid component {p:?}")))
            })
            .collect::<Result<_>>()?;
        let values = match nums.as_slice() {
            [single] => vec![*single],
            [start, stop, step] => {
                if *step <= 0.0 || stop < start {
                    return Err(WocceError::Config(format!(
                        "grid {grid:?} must satisfy start <= stop with positive step"
                    )));
                }
                let mut values = Vec::new();
                let mut v = *start;
                while v <= stop + step * 1e-9 {
                    values.push(v);
                    v += step;
                }
                values
            }
            _ => {
                return Err(WocceError::Config(format!(
                    "grid {grid:?} must be start:stop:step or a single value"
                )))
            }
        };
        if values.is_empty() {
            return Err(WocceError::Config("empty sweep grid".into()));
        }
        Ok(SweepSpec { vary, grid: values })
    }
}

/// Everything one experiment needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: DatasetRef,
    pub normalize: bool,
    pub thresholds: ThresholdConfig,
    pub roster: Vec<RosterEntry>,
    pub runs: usize,
    pub master_seed: u64,
    pub baselines: Vec<Baseline>,
    pub sweep: Option<SweepSpec>,
}

/// One successful run of one method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub nmi: f64,
    pub crowd_size: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedRun {
    pub run: usize,
    pub seed: u64,
    pub error: String,
}

/// Aggregate over the runs of one method; means are over successful runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub mean_accuracy: f64,
    pub mean_nmi: f64,
    pub mean_crowd_size: f64,
    pub mean_wall_seconds: f64,
    pub runs: Vec<RunResult>,
    pub failed_runs: Vec<FailedRun>,
}

impl MethodReport {
    fn from_runs(method: String, runs: Vec<RunResult>, failed_runs: Vec<FailedRun>) -> Self {
        let count = runs.len() as f64;
        let mean = |f: fn(&RunResult) -> f64| {
            if runs.is_empty() {
                0.0
            } else {
                runs.iter().map(f).sum::<f64>() / count
            }
        };
        MethodReport {
            method,
            mean_accuracy: mean(|r| r.accuracy),
            mean_nmi: mean(|r| r.nmi),
            mean_crowd_size: mean(|r| r.crowd_size as f64),
            mean_wall_seconds: mean(|r| r.wall_seconds),
            runs,
            failed_runs,
        }
    }
}

/// Admission history of one ensemble run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunAdmissionLog {
    pub run: usize,
    pub records: Vec<AdmissionRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub samples: usize,
    pub features: usize,
    pub kb: usize,
    pub it: f64,
    pub dt: f64,
    pub ct: u32,
    pub runs_requested: usize,
    pub master_seed: u64,
    pub methods: Vec<MethodReport>,
    pub admission_logs: Vec<RunAdmissionLog>,
    /// Pinned conventions that affect reported numbers.
    pub metadata: BTreeMap<String, String>,
}

impl ExperimentReport {
    pub fn method(&self, name: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == name)
    }

    pub fn has_failed_runs(&self) -> bool {
        self.methods.iter().any(|m| !m.failed_runs.is_empty())
    }

    /// One CSV row per method.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "method,mean_accuracy,mean_nmi,mean_crowd_size,mean_wall_seconds,successful_runs,failed_runs\n",
        );
        for m in &self.methods {
            let _ = writeln!(
                out,
                "{},{:.4},{:.6},{:.2},{:.4},{},{}",
                m.method,
                m.mean_accuracy,
                m.mean_nmi,
                m.mean_crowd_size,
                m.mean_wall_seconds,
                m.runs.len(),
                m.failed_runs.len()
            );
        }
        out
    }

    /// Admission logs flattened to JSON lines, one record per line with the
    /// run index attached.
    pub fn admission_jsonl(&self) -> String {
        let mut out = String::new();
        for log in &self.admission_logs {
            for record in &log.records {
                let mut value = serde_json::to_value(record).expect("record serializes");
                value["run"] = serde_json::json!(log.run);
                let _ = writeln!(out, "{value}");
            }
        }
        out
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Fixed counter scheme: run r of any experiment derives its seed purely
/// from (master_seed, r), so runs are independent yet replayable.
pub fn child_seed(master_seed: u64, run: usize) -> u64 {
    splitmix64(master_seed.wrapping_add((run as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15)))
}

fn score(partition: &Partition, truth: &[usize]) -> Result<(f64, f64)> {
    Ok((
        accuracy(&partition.labels, truth)?,
        nmi(&partition.labels, truth)?,
    ))
}

/// Runs the configured experiment: for every run seed, build the crowd and
/// its consensus, score against ground truth, and do the same for each
/// requested baseline. Crowd-construction failures are recorded per run and
/// excluded from means.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let ds = resolve_dataset(&cfg.dataset, cfg.normalize)?;
    run_experiment_on(cfg, &ds)
}

/// Same as [`run_experiment`] for an already-resolved dataset.
pub fn run_experiment_on(cfg: &ExperimentConfig, ds: &Dataset) -> Result<ExperimentReport> {
    if cfg.runs < 1 {
        return Err(WocceError::Config("runs must be at least 1".into()));
    }
    if cfg.roster.len() < 2 {
        return Err(WocceError::Config(format!(
            "decentralization requires more than one base algorithm, got {}",
            cfg.roster.len()
        )));
    }
    cfg.thresholds.validate()?;
    let truth = ds.labels.as_ref().ok_or_else(|| {
        WocceError::Config(format!("dataset {} has no ground-truth labels", ds.name))
    })?;
    let k_true = ds.k_true.expect("labels imply k_true");

    let mut wocce_runs = Vec::new();
    let mut wocce_failed = Vec::new();
    let mut admission_logs = Vec::new();
    for run in 0..cfg.runs {
        let seed = child_seed(cfg.master_seed, run);
        let start = Instant::now();
        match build_crowd(ds, &cfg.roster, &cfg.thresholds, seed) {
            Ok(crowd) => {
                let consensus = wocce_consensus(&crowd, ds.n(), cfg.thresholds.kb)?;
                let (acc, info) = score(&consensus, truth)?;
                wocce_runs.push(RunResult {
                    run,
                    seed,
                    accuracy: acc,
                    nmi: info,
                    crowd_size: crowd.len(),
                    wall_seconds: start.elapsed().as_secs_f64(),
                });
                admission_logs.push(RunAdmissionLog {
                    run,
                    records: crowd.admission_log,
                });
            }
            Err(WocceError::NoWiseCrowd { log }) => {
                wocce_failed.push(FailedRun {
                    run,
                    seed,
                    error: format!("no wise crowd: all {} candidates rejected", log.len()),
                });
                admission_logs.push(RunAdmissionLog { run, records: log });
            }
            Err(other) => {
                wocce_failed.push(FailedRun {
                    run,
                    seed,
                    error: other.to_string(),
                });
            }
        }
    }

    let mut methods = vec![MethodReport::from_runs(
        "wocce".into(),
        wocce_runs,
        wocce_failed,
    )];

    for baseline in &cfg.baselines {
        let mut runs = Vec::new();
        let mut failed = Vec::new();
        for run in 0..cfg.runs {
            let seed = child_seed(cfg.master_seed, run);
            let start = Instant::now();
            let outcome: Result<(Partition, usize)> = match baseline {
                Baseline::KMeans => kmeans(ds, k_true, seed).map(|p| (p, 1)),
                Baseline::Fcm => fuzzy_cmeans(ds, k_true, seed).map(|p| (p, 1)),
                Baseline::Subtractive => subtractive(ds, 0.5).map(|p| (p, 1)),
                Baseline::SingleLinkage => {
                    hierarchical(ds, LinkageMethod::Single, DistanceMetric::Euclidean, k_true)
                        .map(|p| (p, 1))
                }
                Baseline::Eac => {
                    let eac_cfg = ThresholdConfig {
                        it: 0.0,
                        dt: 0.0,
                        ct: 1,
                        ..cfg.thresholds.clone()
                    };
                    build_crowd(ds, &cfg.roster, &eac_cfg, seed).and_then(|crowd| {
                        let size = crowd.len();
                        wocce_consensus(&crowd, ds.n(), eac_cfg.kb).map(|p| (p, size))
                    })
                }
            };
            match outcome {
                Ok((partition, crowd_size)) => {
                    let (acc, info) = score(&partition, truth)?;
                    runs.push(RunResult {
                        run,
                        seed,
                        accuracy: acc,
                        nmi: info,
                        crowd_size,
                        wall_seconds: start.elapsed().as_secs_f64(),
                    });
                }
                Err(err) => failed.push(FailedRun {
                    run,
                    seed,
                    error: err.to_string(),
                }),
            }
        }
        methods.push(MethodReport::from_runs(
            baseline.name().into(),
            runs,
            failed,
        ));
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("nmi_normalization".into(), "geometric_mean".into());
    metadata.insert("zscore_variance".into(), "population".into());
    metadata.insert(
        "roster".into(),
        cfg.roster
            .iter()
            .map(|e| e.spec_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    Ok(ExperimentReport {
        dataset: ds.name.clone(),
        samples: ds.n(),
        features: ds.d(),
        kb: cfg.thresholds.kb,
        it: cfg.thresholds.it,
        dt: cfg.thresholds.dt,
        ct: cfg.thresholds.ct,
        runs_requested: cfg.runs,
        master_seed: cfg.master_seed,
        methods,
        admission_logs,
        metadata,
    })
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub variable: SweepVariable,
    pub value: f64,
    pub report: ExperimentReport,
}

/// Runs one experiment per grid value, holding the other thresholds
/// disabled (it/dt at 0, ct at 1).
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    let ds = resolve_dataset(&cfg.dataset, cfg.normalize)?;
    run_sweep_on(cfg, &ds)
}

/// Same as [`run_sweep`] for an already-resolved dataset.
pub fn run_sweep_on(cfg: &ExperimentConfig, ds: &Dataset) -> Result<Vec<SweepPoint>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| WocceError::Config("sweep requested without a grid".into()))?;
    let mut points = Vec::with_capacity(sweep.grid.len());
    for &value in &sweep.grid {
        let mut point_cfg = cfg.clone();
        point_cfg.sweep = None;
        let t = &mut point_cfg.thresholds;
        match sweep.vary {
            SweepVariable::It => {
                t.it = value;
                t.dt = 0.0;
                t.ct = 1;
            }
            SweepVariable::Dt => {
                t.it = 0.0;
                t.dt = value;
                t.ct = 1;
            }
            SweepVariable::Ct => {
                t.it = 0.0;
                t.dt = 0.0;
                t.ct = value.round() as u32;
            }
        }
        let report = run_experiment_on(&point_cfg, ds)?;
        points.push(SweepPoint {
            variable: sweep.vary,
            value,
            report,
        });
    }
    Ok(points)
}

/// One CSV row per grid point, suitable for plotting score and runtime
/// against the varied threshold.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(
        "variable,value,mean_accuracy,mean_nmi,mean_crowd_size,mean_wall_seconds,failed_runs\n",
    );
    for point in points {
        let wocce = point
            .report
            .method("wocce")
            .expect("sweep reports include the main method");
        let variable = match point.variable {
            SweepVariable::It => "it",
            SweepVariable::Dt => "dt",
            SweepVariable::Ct => "ct",
        };
        let _ = writeln!(
            out,
            "{},{},{:.4},{:.6},{:.2},{:.4},{}",
            variable,
            point.value,
            wocce.mean_accuracy,
            wocce.mean_nmi,
            wocce.mean_crowd_size,
            wocce.mean_wall_seconds,
            wocce.failed_runs.len()
        );
    }
    out
}

/// Parses the simple `key = value` config file format. Later keys override
/// earlier ones; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(WocceError::Parse {
            line: idx + 1,
            message: format!("expected key = value, got {raw:?}"),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}
