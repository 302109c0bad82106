//! Base (primary) clustering algorithms and the partition type they produce.
//!
//! Every algorithm returns a [`Partition`] carrying the descriptor of the
//! algorithm that made it and, for stochastic families, the initialization
//! values (basic parameters) that determined its outcome. Those two fields
//! drive the independence check during crowd admission.

mod fcm;
mod gmm;
mod hierarchical;
mod kmeans;
mod subtractive;

pub use fcm::{fuzzy_cmeans, fuzzy_cmeans_traced};
pub use gmm::{gmm_em, gmm_em_traced};
pub use hierarchical::{distance_matrix, hierarchical};
pub use kmeans::{kmeans, kmeans_from_initial, kmeans_traced};
pub use subtractive::subtractive;

use std::fmt;

use crate::dataset::Dataset;
use crate::error::{Result, WocceError};
use crate::linkage::LinkageMethod;

/// Base algorithm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    KMeans,
    FuzzyCMeans,
    GaussianMixture,
    Subtractive,
    Hierarchical,
    /// Marks partitions produced by the consensus stage, never by a roster.
    Consensus,
}

/// Pairwise distance used by the hierarchical family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum DistanceMetric {
    Euclidean,
    Hamming,
    Cosine,
}

/// Identity of a base algorithm. Full-field equality defines "same
/// algorithm type" for the independence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct AlgorithmDescriptor {
    pub family: Family,
    /// Present iff family is Hierarchical.
    pub linkage: Option<LinkageMethod>,
    /// Present iff family is Hierarchical.
    pub metric: Option<DistanceMetric>,
    /// Whether repeated runs can differ for different seeds.
    pub stochastic: bool,
}

impl AlgorithmDescriptor {
    pub fn kmeans() -> Self {
        Self {
            family: Family::KMeans,
            linkage: None,
            metric: None,
            stochastic: true,
        }
    }

    pub fn fuzzy_cmeans() -> Self {
        Self {
            family: Family::FuzzyCMeans,
            linkage: None,
            metric: None,
            stochastic: true,
        }
    }

    pub fn gaussian_mixture() -> Self {
        Self {
            family: Family::GaussianMixture,
            linkage: None,
            metric: None,
            stochastic: true,
        }
    }

    pub fn subtractive() -> Self {
        Self {
            family: Family::Subtractive,
            linkage: None,
            metric: None,
            stochastic: false,
        }
    }

    pub fn hierarchical(linkage: LinkageMethod, metric: DistanceMetric) -> Self {
        Self {
            family: Family::Hierarchical,
            linkage: Some(linkage),
            metric: Some(metric),
            stochastic: false,
        }
    }

    pub fn consensus() -> Self {
        Self {
            family: Family::Consensus,
            linkage: None,
            metric: None,
            stochastic: false,
        }
    }
}

impl fmt::Display for AlgorithmDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::KMeans => write!(f, "kmeans"),
            Family::FuzzyCMeans => write!(f, "fcm"),
            Family::GaussianMixture => write!(f, "gmm"),
            Family::Subtractive => write!(f, "subtractive"),
            Family::Consensus => write!(f, "consensus"),
            Family::Hierarchical => {
                let linkage = match self.linkage {
                    Some(LinkageMethod::Single) => "single",
                    Some(LinkageMethod::Average) => "average",
                    Some(LinkageMethod::Complete) => "complete",
                    Some(LinkageMethod::Ward) => "ward",
                    None => "?",
                };
                let metric = match self.metric {
                    Some(DistanceMetric::Euclidean) => "euclidean",
                    Some(DistanceMetric::Hamming) => "hamming",
                    Some(DistanceMetric::Cosine) => "cosine",
                    None => "?",
                };
                write!(f, "hier:{linkage}:{metric}")
            }
        }
    }
}

/// A hard clustering of all samples: contiguous labels 0..k-1, every cluster
/// nonempty, plus enough provenance to score independence against other
/// partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub labels: Vec<usize>,
    pub k: usize,
    pub descriptor: AlgorithmDescriptor,
    /// Initialization values, one row per parameter vector (e.g. k initial
    /// centers); empty for deterministic families other than Subtractive.
    pub basic_params: Vec<Vec<f64>>,
    pub source_seed: u64,
}

impl Partition {
    /// Relabels `raw` to contiguous 0-based ids by first occurrence and
    /// builds the partition.
    pub fn from_raw_labels(
        raw: Vec<usize>,
        descriptor: AlgorithmDescriptor,
        basic_params: Vec<Vec<f64>>,
        source_seed: u64,
    ) -> Self {
        let (labels, k) = relabel_contiguous(raw);
        Partition {
            labels,
            k,
            descriptor,
            basic_params,
            source_seed,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Cluster sizes indexed by label.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Maps arbitrary cluster ids to contiguous 0-based ids in first-occurrence
/// order; returns the new labels and the cluster count.
pub fn relabel_contiguous(raw: Vec<usize>) -> (Vec<usize>, usize) {
    let mut map: Vec<(usize, usize)> = Vec::new();
    let labels = raw
        .into_iter()
        .map(|v| {
            if let Some(&(_, new)) = map.iter().find(|(old, _)| *old == v) {
                new
            } else {
                let new = map.len();
                map.push((v, new));
                new
            }
        })
        .collect();
    (labels, map.len())
}

/// One roster slot: a descriptor plus any per-entry run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RosterEntry {
    pub descriptor: AlgorithmDescriptor,
    /// Neighborhood radius for Subtractive (on min-max scaled data).
    pub radius: Option<f64>,
}

impl RosterEntry {
    pub fn new(descriptor: AlgorithmDescriptor) -> Self {
        RosterEntry {
            descriptor,
            radius: None,
        }
    }

    /// Parses descriptor strings like `kmeans`, `gmm`, `subtractive:0.5`,
    /// or `hier:ward:cosine`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let bad = || WocceError::Config(format!("unknown algorithm spec {spec:?}"));
        match parts.as_slice() {
            ["kmeans"] => Ok(Self::new(AlgorithmDescriptor::kmeans())),
            ["fcm"] => Ok(Self::new(AlgorithmDescriptor::fuzzy_cmeans())),
            ["gmm"] => Ok(Self::new(AlgorithmDescriptor::gaussian_mixture())),
            ["subtractive"] => Ok(Self::new(AlgorithmDescriptor::subtractive())),
            ["subtractive", r] => {
                let radius: f64 = r.parse().map_err(|_| bad())?;
                if radius <= 0.0 {
                    return Err(WocceError::Config(format!(
                        "subtractive radius must be positive, got {radius}"
                    )));
                }
                Ok(RosterEntry {
                    descriptor: AlgorithmDescriptor::subtractive(),
                    radius: Some(radius),
                })
            }
            ["hier", linkage, metric] => {
                let linkage = match *linkage {
                    "single" => LinkageMethod::Single,
                    "average" => LinkageMethod::Average,
                    "complete" => LinkageMethod::Complete,
                    "ward" => LinkageMethod::Ward,
                    _ => return Err(bad()),
                };
                let metric = match *metric {
                    "euclidean" => DistanceMetric::Euclidean,
                    "hamming" => DistanceMetric::Hamming,
                    "cosine" => DistanceMetric::Cosine,
                    _ => return Err(bad()),
                };
                Ok(Self::new(AlgorithmDescriptor::hierarchical(
                    linkage, metric,
                )))
            }
            _ => Err(bad()),
        }
    }

    pub fn spec_string(&self) -> String {
        match (self.descriptor.family, self.radius) {
            (Family::Subtractive, Some(r)) => format!("subtractive:{r}"),
            _ => self.descriptor.to_string(),
        }
    }
}

/// Parses a comma-separated roster list.
pub fn parse_roster(list: &str) -> Result<Vec<RosterEntry>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(RosterEntry::parse)
        .collect()
}

/// The full roster of base algorithms: the stochastic center-based methods,
/// subtractive clustering, and all linkage/metric combinations.
pub fn default_roster() -> Vec<RosterEntry> {
    let mut roster = vec![
        RosterEntry::new(AlgorithmDescriptor::kmeans()),
        RosterEntry::new(AlgorithmDescriptor::fuzzy_cmeans()),
        RosterEntry::new(AlgorithmDescriptor::gaussian_mixture()),
        RosterEntry::new(AlgorithmDescriptor::subtractive()),
    ];
    for linkage in [
        LinkageMethod::Single,
        LinkageMethod::Average,
        LinkageMethod::Complete,
        LinkageMethod::Ward,
    ] {
        for metric in [
            DistanceMetric::Euclidean,
            DistanceMetric::Hamming,
            DistanceMetric::Cosine,
        ] {
            roster.push(RosterEntry::new(AlgorithmDescriptor::hierarchical(
                linkage, metric,
            )));
        }
    }
    roster
}

/// Runs one base algorithm, producing a partition with contiguous labels and
/// recorded provenance. `k` is the requested cluster count; Subtractive
/// determines its own.
pub fn run_base(entry: &RosterEntry, ds: &Dataset, k: usize, seed: u64) -> Result<Partition> {
    let n = ds.n();
    if entry.descriptor.family != Family::Subtractive && (k < 2 || k > n) {
        return Err(WocceError::Size(format!(
            "requested k={k} out of range 2..={n}"
        )));
    }
    let mut partition = match entry.descriptor.family {
        Family::KMeans => kmeans(ds, k, seed)?,
        Family::FuzzyCMeans => fuzzy_cmeans(ds, k, seed)?,
        Family::GaussianMixture => gmm_em(ds, k, seed)?,
        Family::Subtractive => subtractive(ds, entry.radius.unwrap_or(0.5))?,
        Family::Hierarchical => {
            let linkage = entry.descriptor.linkage.expect("hierarchical linkage");
            let metric = entry.descriptor.metric.expect("hierarchical metric");
            hierarchical(ds, linkage, metric, k)?
        }
        Family::Consensus => {
            return Err(WocceError::Config(
                "consensus is not a base algorithm".into(),
            ))
        }
    };
    partition.source_seed = seed;
    Ok(partition)
}

pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}
