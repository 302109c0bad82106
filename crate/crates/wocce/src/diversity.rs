//! Diversity scoring of a candidate partition against the current crowd.
//!
//! The chain is: a cluster is compared to one partition (apmm), averaged
//! over a reference set (aapmm), size-weighted over the candidate's clusters
//! (a3), and complemented to give the diversity admission score.

use crate::base::Partition;
use crate::error::{Result, WocceError};

/// One cluster of a partition, viewed against the total sample count.
#[derive(Debug, Clone)]
pub struct ClusterView {
    pub member_indices: Vec<usize>,
    pub n: usize,
}

impl ClusterView {
    pub fn size(&self) -> usize {
        self.member_indices.len()
    }
}

/// Splits a partition into per-cluster views, ordered by cluster label.
pub fn cluster_views(p: &Partition) -> Vec<ClusterView> {
    let n = p.n();
    let mut views: Vec<ClusterView> = (0..p.k)
        .map(|_| ClusterView {
            member_indices: Vec::new(),
            n,
        })
        .collect();
    for (i, &label) in p.labels.iter().enumerate() {
        views[label].member_indices.push(i);
    }
    views
}

/// Similarity of cluster `c` to partition `p`, before clamping. The value
/// is a ratio of log-size terms and can exceed 1 when `p` is a single
/// cluster; the 0/0 case (`c` covers everything and `p` is one cluster)
/// evaluates to 1.
pub fn apmm_raw(c: &ClusterView, p: &Partition) -> Result<f64> {
    let n = c.n;
    if p.n() != n {
        return Err(WocceError::Size(format!(
            "cluster over {n} samples scored against partition over {}",
            p.n()
        )));
    }
    let n_c = c.size() as f64;
    let n_f = n as f64;
    let numerator = -2.0 * n_c * (n_f / n_c).ln();
    let mut denominator = n_c * (n_c / n_f).ln();
    for &size in &p.cluster_sizes() {
        let s = size as f64;
        denominator += s * (s / n_f).ln();
    }
    if numerator == 0.0 && denominator == 0.0 {
        return Ok(1.0);
    }
    Ok(numerator / denominator)
}

/// Clamped similarity of cluster `c` to partition `p`, in [0,1].
pub fn apmm(c: &ClusterView, p: &Partition) -> Result<f64> {
    Ok(apmm_raw(c, p)?.clamp(0.0, 1.0))
}

/// Mean apmm of one cluster over a nonempty reference set of partitions.
pub fn aapmm(c: &ClusterView, reference: &[Partition]) -> Result<f64> {
    if reference.is_empty() {
        return Err(WocceError::Domain(
            "aapmm needs a nonempty reference set".into(),
        ));
    }
    let mut total = 0.0;
    for p in reference {
        total += apmm(c, p)?;
    }
    Ok(total / reference.len() as f64)
}

/// Size-weighted mean aapmm over the clusters of `p`: the similarity of a
/// whole partition to the reference set, in [0,1].
pub fn a3(p: &Partition, reference: &[Partition]) -> Result<f64> {
    if reference.is_empty() {
        return Err(WocceError::Domain(
            "a3 needs a nonempty reference set".into(),
        ));
    }
    let n = p.n() as f64;
    let mut total = 0.0;
    for view in cluster_views(p) {
        total += view.size() as f64 * aapmm(&view, reference)?;
    }
    Ok(total / n)
}

/// Diversity admission score: 1 - a3. An empty crowd scores 1 so the first
/// candidate can always be admitted.
pub fn diversity(p: &Partition, crowd: &[Partition]) -> Result<f64> {
    if crowd.is_empty() {
        return Ok(1.0);
    }
    Ok(1.0 - a3(p, crowd)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::AlgorithmDescriptor;

    fn partition(labels: Vec<usize>) -> Partition {
        Partition::from_raw_labels(labels, AlgorithmDescriptor::kmeans(), Vec::new(), 0)
    }

    fn view(members: &[usize], n: usize) -> ClusterView {
        ClusterView {
            member_indices: members.to_vec(),
            n,
        }
    }

    #[test]
    fn apmm_balanced_two_clusters() {
        // n=4, n_c=2, partition sizes {2,2}: (-4 ln2)/(-6 ln2) = 2/3.
        let p = partition(vec![0, 0, 1, 1]);
        let c = view(&[0, 1], 4);
        assert!((apmm(&c, &p).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn apmm_degenerate_all_vs_single_cluster_is_one() {
        let p = partition(vec![0, 0, 0, 0]);
        let c = view(&[0, 1, 2, 3], 4);
        assert_eq!(apmm(&c, &p).unwrap(), 1.0);
    }

    #[test]
    fn apmm_clamps_single_cluster_partition() {
        // n=4, n_c=2 against one cluster of 4: raw ratio is 2, clamped to 1.
        let p = partition(vec![0, 0, 0, 0]);
        let c = view(&[0, 1], 4);
        assert!((apmm_raw(&c, &p).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(apmm(&c, &p).unwrap(), 1.0);
    }

    #[test]
    fn apmm_rejects_sample_count_mismatch() {
        let p = partition(vec![0, 1]);
        let c = view(&[0], 3);
        assert!(matches!(apmm(&c, &p), Err(WocceError::Size(_))));
    }

    #[test]
    fn apmm_is_log_base_invariant() {
        // Recompute the 2/3 case with explicit base-2 and base-10 logs.
        for base in [2.0f64, 10.0] {
            let n: f64 = 4.0;
            let n_c: f64 = 2.0;
            let num = -2.0 * n_c * (n / n_c).log(base);
            let den = n_c * (n_c / n).log(base) + 2.0 * (2.0 * (2.0f64 / n).log(base));
            assert!((num / den - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn aapmm_means_and_guards() {
        let p = partition(vec![0, 0, 1, 1]);
        let c = view(&[0, 1], 4);
        let reference = vec![p.clone(), p.clone()];
        assert!((aapmm(&c, &reference).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((aapmm(&c, &reference[..1]).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(matches!(aapmm(&c, &[]), Err(WocceError::Domain(_))));
        // Mean of apmm values {1, 0}: 0.5 via the degenerate and n_c=n cases.
        let c_all = view(&[0, 1, 2, 3], 4);
        let single = partition(vec![0, 0, 0, 0]);
        let split = partition(vec![0, 0, 1, 1]);
        assert_eq!(apmm(&c_all, &single).unwrap(), 1.0);
        assert_eq!(apmm(&c_all, &split).unwrap(), 0.0);
        assert!((aapmm(&c_all, &[single, split]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn a3_weights_by_cluster_size() {
        // Against itself, every cluster of the balanced 2-clustering scores
        // 2/3, so a3 is 2/3 and diversity 1/3.
        let p = partition(vec![0, 0, 1, 1]);
        let a = a3(&p, std::slice::from_ref(&p)).unwrap();
        assert!((a - 2.0 / 3.0).abs() < 1e-12);
        let d = diversity(&p, std::slice::from_ref(&p)).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn a3_equals_size_weighted_aapmm() {
        // Cluster sizes {3,1}: a3 = (3*aapmm(C1) + 1*aapmm(C2)) / 4.
        let p = partition(vec![0, 0, 0, 1]);
        let reference = vec![partition(vec![0, 1, 0, 1]), partition(vec![0, 0, 1, 1])];
        let views = cluster_views(&p);
        assert_eq!(views[0].size(), 3);
        assert_eq!(views[1].size(), 1);
        let weighted = (3.0 * aapmm(&views[0], &reference).unwrap()
            + aapmm(&views[1], &reference).unwrap())
            / 4.0;
        assert!((a3(&p, &reference).unwrap() - weighted).abs() < 1e-12);
    }

    #[test]
    fn a3_is_between_min_and_max_aapmm() {
        let p = partition(vec![0, 0, 0, 1]);
        let reference = vec![partition(vec![0, 1, 1, 1]), partition(vec![0, 0, 1, 1])];
        let views = cluster_views(&p);
        let scores: Vec<f64> = views
            .iter()
            .map(|v| aapmm(v, &reference).unwrap())
            .collect();
        let a = a3(&p, &reference).unwrap();
        let lo = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(a >= lo - 1e-12 && a <= hi + 1e-12);
    }

    #[test]
    fn diversity_empty_crowd_is_one() {
        let p = partition(vec![0, 1, 0, 1]);
        assert_eq!(diversity(&p, &[]).unwrap(), 1.0);
    }

    #[test]
    fn singleton_cluster_evaluates_normally() {
        let p = partition(vec![0, 0, 0, 1]);
        let c = view(&[3], 4);
        let value = apmm(&c, &p).unwrap();
        assert!((0.0..=1.0).contains(&value));
    }
}
