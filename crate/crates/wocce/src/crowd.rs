//! Feedback admission loop: generate decentralized candidates and admit
//! those that pass the independence and diversity thresholds against the
//! crowd as it currently stands.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::{distance_matrix, run_base, Family, Partition, RosterEntry};
use crate::dataset::Dataset;
use crate::diversity::diversity;
use crate::error::{Result, WocceError};
use crate::independence::independence;
use crate::linkage::{agglomerate, Dendrogram};

/// Admission thresholds and generation limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdConfig {
    /// Independence threshold in [0,1].
    pub it: f64,
    /// Diversity threshold in [0,1].
    pub dt: f64,
    /// Decentralization coefficient: base runs use between kb and ct*kb
    /// clusters.
    pub ct: u32,
    /// Final (consensus) cluster count.
    pub kb: usize,
    /// Maximum number of candidate generations.
    pub candidate_budget: usize,
    /// Optional early stop once the crowd reaches this size.
    pub target_crowd_size: Option<usize>,
    /// Always request exactly ct*kb clusters instead of sampling the range.
    pub force_max_clusters: bool,
}

impl ThresholdConfig {
    pub fn new(it: f64, dt: f64, ct: u32, kb: usize, candidate_budget: usize) -> Result<Self> {
        let cfg = ThresholdConfig {
            it,
            dt,
            ct,
            kb,
            candidate_budget,
            target_crowd_size: None,
            force_max_clusters: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.it) || !(0.0..=1.0).contains(&self.dt) {
            return Err(WocceError::Config(format!(
                "thresholds must lie in [0,1], got it={} dt={}",
                self.it, self.dt
            )));
        }
        if self.ct < 1 {
            return Err(WocceError::Config("ct must be at least 1".into()));
        }
        if self.kb < 2 {
            return Err(WocceError::Config("kb must be at least 2".into()));
        }
        if self.candidate_budget < 1 {
            return Err(WocceError::Config("candidate budget must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of one admission attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    RejectedIndependence,
    RejectedDiversity,
}

/// What the admission loop saw for one candidate, with scores as they were
/// at admission time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissionRecord {
    pub attempt: usize,
    pub descriptor: String,
    pub requested_k: usize,
    pub seed: u64,
    pub independence: f64,
    /// Only computed when the independence condition passes.
    pub diversity: Option<f64>,
    pub verdict: Verdict,
}

/// The admitted ensemble members plus the full admission history.
#[derive(Debug, Clone, Default)]
pub struct Crowd {
    pub members: Vec<Partition>,
    pub admission_log: Vec<AdmissionRecord>,
}

impl Crowd {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Serializes the admission log as JSON lines.
    pub fn admission_log_jsonl(&self) -> String {
        self.admission_log
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes"))
            .fold(String::new(), |mut acc, line| {
                acc.push_str(&line);
                acc.push('\n');
                acc
            })
    }
}

/// Uniform cluster-count draw from [kb, ct*kb]; degenerate to kb when ct=1.
pub fn sample_cluster_count(kb: usize, ct: u32, rng: &mut impl Rng) -> usize {
    let hi = kb * ct as usize;
    if hi == kb {
        kb
    } else {
        rng.gen_range(kb..=hi)
    }
}

/// Scores a candidate against the current crowd: independence first, then
/// diversity only if the independence condition (strict) passes. Accepted
/// candidates are appended; every attempt is logged.
pub fn admit(
    candidate: Partition,
    crowd: &mut Crowd,
    cfg: &ThresholdConfig,
    attempt: usize,
    requested_k: usize,
) -> Result<Verdict> {
    let ind = independence(&candidate, &crowd.members)?;
    let mut div = None;
    let verdict = if ind > cfg.it {
        let d = diversity(&candidate, &crowd.members)?;
        div = Some(d);
        if d > cfg.dt {
            Verdict::Accepted
        } else {
            Verdict::RejectedDiversity
        }
    } else {
        Verdict::RejectedIndependence
    };
    crowd.admission_log.push(AdmissionRecord {
        attempt,
        descriptor: candidate.descriptor.to_string(),
        requested_k,
        seed: candidate.source_seed,
        independence: ind,
        diversity: div,
        verdict,
    });
    if verdict == Verdict::Accepted {
        crowd.members.push(candidate);
    }
    Ok(verdict)
}

/// Runs the full feedback loop: round-robin over the roster, drawing a
/// fresh seed and cluster count per attempt, until the candidate budget is
/// exhausted or the target crowd size is reached. Deterministic for a fixed
/// seed.
pub fn build_crowd(
    ds: &Dataset,
    roster: &[RosterEntry],
    cfg: &ThresholdConfig,
    seed: u64,
) -> Result<Crowd> {
    cfg.validate()?;
    if roster.len() < 2 {
        return Err(WocceError::Config(format!(
            "decentralization requires more than one base algorithm, got {}",
            roster.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut crowd = Crowd::default();
    // Deterministic algorithms repeat exactly, so repeated attempts reuse
    // earlier work: hierarchical entries keep their dendrogram (only the
    // cut depends on k), subtractive keeps its partition. Results are
    // identical to fresh runs; only the per-attempt seed differs.
    let mut partition_cache: HashMap<usize, Partition> = HashMap::new();
    let mut dendrogram_cache: HashMap<usize, Dendrogram> = HashMap::new();

    for attempt in 0..cfg.candidate_budget {
        if let Some(target) = cfg.target_crowd_size {
            if crowd.len() >= target {
                break;
            }
        }
        let entry_idx = attempt % roster.len();
        let entry = &roster[entry_idx];
        let run_seed: u64 = rng.gen();
        let k = if cfg.force_max_clusters {
            cfg.kb * cfg.ct as usize
        } else {
            sample_cluster_count(cfg.kb, cfg.ct, &mut rng)
        };
        let candidate = match entry.descriptor.family {
            Family::Hierarchical => {
                if k < 2 || k > ds.n() {
                    return Err(WocceError::Size(format!(
                        "requested k={k} out of range 2..={}",
                        ds.n()
                    )));
                }
                let dendrogram = match dendrogram_cache.entry(entry_idx) {
                    std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        let metric = entry.descriptor.metric.expect("hierarchical metric");
                        let linkage = entry.descriptor.linkage.expect("hierarchical linkage");
                        let matrix = distance_matrix(ds, metric);
                        e.insert(agglomerate(&matrix, linkage)?)
                    }
                };
                let labels = dendrogram.cut(k)?;
                Partition::from_raw_labels(labels, entry.descriptor, Vec::new(), run_seed)
            }
            Family::Subtractive => match partition_cache.get(&entry_idx) {
                Some(p) => {
                    let mut p = p.clone();
                    p.source_seed = run_seed;
                    p
                }
                None => {
                    let p = run_base(entry, ds, k, run_seed)?;
                    partition_cache.insert(entry_idx, p.clone());
                    p
                }
            },
            _ => run_base(entry, ds, k, run_seed)?,
        };
        admit(candidate, &mut crowd, cfg, attempt, k)?;
    }

    if crowd.is_empty() {
        return Err(WocceError::NoWiseCrowd {
            log: crowd.admission_log,
        });
    }
    Ok(crowd)
}
