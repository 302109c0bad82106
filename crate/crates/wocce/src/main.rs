//! Command-line front end: run one experiment or a threshold sweep and emit
//! JSON/CSV reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wocce::base::{default_roster, parse_roster, RosterEntry};
use wocce::crowd::ThresholdConfig;
use wocce::error::{Result, WocceError};
use wocce::harness::{
    parse_baselines, parse_config_file, run_experiment, run_sweep, sweep_csv, DatasetRef,
    ExperimentConfig, SweepSpec,
};

#[derive(Parser)]
#[command(name = "wocce", version, about = "Wise-crowd cluster ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build crowds, aggregate, and score against ground truth.
    Run(RunArgs),
    /// Vary one threshold over a grid with the others disabled.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Key-value config file; command-line flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Dataset: a labeled CSV path or the built-in name "halfring".
    #[arg(long)]
    dataset: Option<String>,

    /// Z-score the features before clustering.
    #[arg(long)]
    normalize: bool,

    /// Final cluster count (defaults to the dataset's class count).
    #[arg(long)]
    kb: Option<usize>,

    /// Number of independent runs to average.
    #[arg(long)]
    runs: Option<usize>,

    /// Master seed; each run derives its own child seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Candidate generation budget (default: 10x roster size).
    #[arg(long)]
    budget: Option<usize>,

    /// Stop a crowd early at this size.
    #[arg(long)]
    target_size: Option<usize>,

    /// Request exactly ct*kb clusters instead of sampling [kb, ct*kb].
    #[arg(long)]
    force_max_clusters: bool,

    /// Comma-separated base algorithms, e.g. "kmeans,gmm,hier:ward:cosine".
    #[arg(long)]
    roster: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Independence threshold in [0,1].
    #[arg(long)]
    it: Option<f64>,

    /// Diversity threshold in [0,1].
    #[arg(long)]
    dt: Option<f64>,

    /// Decentralization coefficient (cluster-count multiplier).
    #[arg(long)]
    ct: Option<u32>,

    /// Comparison methods: kmeans, fcm, subtractive, single_linkage, eac.
    #[arg(long)]
    baselines: Option<String>,

    /// Full JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Per-method CSV summary path.
    #[arg(long)]
    summary: Option<PathBuf>,

    /// Admission log path (JSON lines).
    #[arg(long)]
    admission: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Which threshold to vary: it, dt, or ct.
    #[arg(long)]
    vary: Option<String>,

    /// Inclusive grid "start:stop:step" (or a single value).
    #[arg(long)]
    grid: Option<String>,

    /// Sweep CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One resolved setting: flag if given, else config-file entry, else default.
struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: &Option<PathBuf>) -> Result<Self> {
        let file = match path {
            Some(p) => parse_config_file(&fs::read_to_string(p)?)?,
            None => BTreeMap::new(),
        };
        Ok(Settings { file })
    }

    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                WocceError::Config(format!("bad value {raw:?} for config key {key:?}"))
            }),
            None => Ok(None),
        }
    }

    fn get_string(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.file.get(key).cloned())
    }

    fn get_flag(&self, flag: bool, key: &str) -> bool {
        flag || self
            .file
            .get(key)
            .map(|v| v == "true" || v == "1")
            .unwrap_or(false)
    }
}

fn resolve_roster(settings: &Settings, flag: Option<String>) -> Result<Vec<RosterEntry>> {
    match settings.get_string(flag, "roster") {
        Some(list) => {
            let roster = parse_roster(&list)?;
            if roster.is_empty() {
                return Err(WocceError::Config("empty roster".into()));
            }
            Ok(roster)
        }
        None => Ok(default_roster()),
    }
}

fn resolve_kb(kb: Option<usize>, dataset: &DatasetRef, normalize: bool) -> Result<usize> {
    if let Some(kb) = kb {
        return Ok(kb);
    }
    let ds = wocce::harness::resolve_dataset(dataset, normalize)?;
    ds.k_true.ok_or_else(|| {
        WocceError::Config("dataset has no class labels; pass --kb explicitly".into())
    })
}

fn build_config(common: &CommonArgs, settings: &Settings) -> Result<(ExperimentConfig, usize)> {
    let dataset_spec = settings
        .get_string(common.dataset.clone(), "dataset")
        .ok_or_else(|| WocceError::Config("no dataset given (flag or config file)".into()))?;
    let dataset = DatasetRef::parse(&dataset_spec);
    let normalize = settings.get_flag(common.normalize, "normalize");
    let roster = resolve_roster(settings, common.roster.clone())?;
    let kb = resolve_kb(settings.get(common.kb, "kb")?, &dataset, normalize)?;
    let runs = settings.get(common.runs, "runs")?.unwrap_or(10);
    let seed = settings.get(common.seed, "seed")?.unwrap_or(42);
    let budget = settings
        .get(common.budget, "budget")?
        .unwrap_or(10 * roster.len());
    let target_size = settings.get(common.target_size, "target_size")?;

    let mut thresholds = ThresholdConfig::new(0.0, 0.0, 1, kb, budget)?;
    thresholds.target_crowd_size = target_size;
    thresholds.force_max_clusters = settings.get_flag(common.force_max_clusters, "force_max_clusters");

    Ok((
        ExperimentConfig {
            dataset,
            normalize,
            thresholds,
            roster,
            runs,
            master_seed: seed,
            baselines: Vec::new(),
            sweep: None,
        },
        kb,
    ))
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let settings = Settings::load(&args.common.config)?;
    let (mut cfg, _) = build_config(&args.common, &settings)?;
    cfg.thresholds.it = settings.get(args.it, "it")?.unwrap_or(0.0);
    cfg.thresholds.dt = settings.get(args.dt, "dt")?.unwrap_or(0.0);
    cfg.thresholds.ct = settings.get(args.ct, "ct")?.unwrap_or(1);
    cfg.thresholds.validate()?;
    if let Some(list) = settings.get_string(args.baselines, "baselines") {
        cfg.baselines = parse_baselines(&list)?;
    }

    let report = run_experiment(&cfg)?;

    let out = settings
        .get(args.out, "out")?
        .unwrap_or_else(|| PathBuf::from("report.json"));
    fs::write(&out, serde_json::to_string_pretty(&report)?.as_bytes())?;
    let summary = settings
        .get(args.summary, "summary")?
        .unwrap_or_else(|| PathBuf::from("summary.csv"));
    fs::write(&summary, report.summary_csv())?;
    let admission = settings
        .get(args.admission, "admission")?
        .unwrap_or_else(|| PathBuf::from("admission.jsonl"));
    fs::write(&admission, report.admission_jsonl())?;

    println!(
        "dataset {} (n={}, d={}), kb={}, it={}, dt={}, ct={}",
        report.dataset, report.samples, report.features, report.kb, report.it, report.dt,
        report.ct
    );
    for method in &report.methods {
        println!(
            "  {:<16} accuracy {:6.2}  nmi {:.4}  crowd {:6.1}  ({} ok, {} failed)",
            method.method,
            method.mean_accuracy,
            method.mean_nmi,
            method.mean_crowd_size,
            method.runs.len(),
            method.failed_runs.len()
        );
    }
    println!("wrote {}, {}, {}", out.display(), summary.display(), admission.display());
    Ok(report.has_failed_runs())
}

fn cmd_sweep(args: SweepArgs) -> Result<bool> {
    let settings = Settings::load(&args.common.config)?;
    let (mut cfg, _) = build_config(&args.common, &settings)?;
    let vary = settings
        .get_string(args.vary, "vary")
        .ok_or_else(|| WocceError::Config("sweep needs --vary it|dt|ct".into()))?;
    let grid = settings
        .get_string(args.grid, "grid")
        .ok_or_else(|| WocceError::Config("sweep needs --grid start:stop:step".into()))?;
    cfg.sweep = Some(SweepSpec::parse(&vary, &grid)?);

    let points = run_sweep(&cfg)?;
    let csv = sweep_csv(&points);
    let out = settings
        .get(args.out, "out")?
        .unwrap_or_else(|| PathBuf::from("sweep.csv"));
    fs::write(&out, &csv)?;

    print!("{csv}");
    println!("wrote {}", out.display());
    let failed = points.iter().any(|p| p.report.has_failed_runs());
    Ok(failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("warning: some runs failed (see report)");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
