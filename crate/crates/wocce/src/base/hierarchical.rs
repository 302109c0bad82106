//! Agglomerative base clusterings over Euclidean, Hamming, or Cosine
//! distances.

use super::{AlgorithmDescriptor, DistanceMetric, Partition};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::linkage::{agglomerate, LinkageMethod};

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    super::squared_euclidean(a, b).sqrt()
}

/// Fraction of coordinates that differ exactly.
pub(crate) fn hamming(a: &[f64], b: &[f64]) -> f64 {
    let differing = a.iter().zip(b).filter(|(x, y)| x != y).count();
    differing as f64 / a.len() as f64
}

/// 1 - cosine similarity; zero vectors get similarity 0.
pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sim = if na > 0.0 && nb > 0.0 {
        dot / (na * nb)
    } else {
        0.0
    };
    1.0 - sim
}

/// Full pairwise distance matrix under the given metric.
pub fn distance_matrix(ds: &Dataset, metric: DistanceMetric) -> Vec<Vec<f64>> {
    let n = ds.n();
    let dist = match metric {
        DistanceMetric::Euclidean => euclidean,
        DistanceMetric::Hamming => hamming,
        DistanceMetric::Cosine => cosine,
    };
    let mut matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist(&ds.features[i], &ds.features[j]);
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }
    matrix
}

/// Agglomerative clustering cut to exactly `k` clusters. Deterministic; the
/// partition carries no basic parameters.
pub fn hierarchical(
    ds: &Dataset,
    linkage: LinkageMethod,
    metric: DistanceMetric,
    k: usize,
) -> Result<Partition> {
    let matrix = distance_matrix(ds, metric);
    let dendrogram = agglomerate(&matrix, linkage)?;
    let labels = dendrogram.cut(k)?;
    Ok(Partition::from_raw_labels(
        labels,
        AlgorithmDescriptor::hierarchical(linkage, metric),
        Vec::new(),
        0,
    ))
}
