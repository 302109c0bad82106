//! Aggregation of the crowd: co-association matrix, average-linkage
//! dendrogram over its complement, and the final cut.

use std::fmt::Write as _;
use std::path::Path;

use crate::base::{AlgorithmDescriptor, Partition};
use crate::crowd::Crowd;
use crate::error::{Result, WocceError};
use crate::linkage::{agglomerate, Dendrogram, LinkageMethod};

/// Symmetric n x n matrix of pairwise same-cluster frequencies, unit
/// diagonal, entries in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct CoAssociation {
    pub values: Vec<Vec<f64>>,
}

impl CoAssociation {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Writes the matrix as plain CSV for inspection.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for row in &self.values {
            let line = row
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(out, "{line}");
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Co-association over possibly partial labelings: entry (i,j) is the
/// number of partitions placing i and j in the same cluster divided by the
/// number of partitions in which both are present. Pairs never observed
/// together score 0.
pub fn co_association_masked(members: &[Vec<Option<usize>>], n: usize) -> Result<CoAssociation> {
    if members.is_empty() {
        return Err(WocceError::Domain(
            "co-association needs a nonempty crowd".into(),
        ));
    }
    for (idx, labels) in members.iter().enumerate() {
        if labels.len() != n {
            return Err(WocceError::Size(format!(
                "member {idx} covers {} samples, expected {n}",
                labels.len()
            )));
        }
    }
    let mut values = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        values[i][i] = 1.0;
        for j in (i + 1)..n {
            let mut together = 0u32;
            let mut observed = 0u32;
            for labels in members {
                if let (Some(a), Some(b)) = (labels[i], labels[j]) {
                    observed += 1;
                    if a == b {
                        together += 1;
                    }
                }
            }
            let value = if observed > 0 {
                together as f64 / observed as f64
            } else {
                0.0
            };
            values[i][j] = value;
            values[j][i] = value;
        }
    }
    Ok(CoAssociation { values })
}

/// Co-association of a crowd of full partitions: every pair is observed in
/// all M members, so entries are multiples of 1/M.
pub fn co_association(crowd: &Crowd, n: usize) -> Result<CoAssociation> {
    let members: Vec<Vec<Option<usize>>> = crowd
        .members
        .iter()
        .map(|p| p.labels.iter().map(|&l| Some(l)).collect())
        .collect();
    co_association_masked(&members, n)
}

/// Unweighted-average agglomeration of a dissimilarity matrix.
pub fn average_linkage(dissimilarity: &[Vec<f64>]) -> Result<Dendrogram> {
    agglomerate(dissimilarity, LinkageMethod::Average)
}

/// Cuts the dendrogram to exactly `k` clusters; the result is marked as
/// consensus output and carries no basic parameters.
pub fn consensus_cut(dendrogram: &Dendrogram, k: usize) -> Result<Partition> {
    let labels = dendrogram.cut(k)?;
    Ok(Partition::from_raw_labels(
        labels,
        AlgorithmDescriptor::consensus(),
        Vec::new(),
        0,
    ))
}

/// Full aggregation: dissimilarity 1 - C, average linkage, cut at `kb`.
pub fn wocce_consensus(crowd: &Crowd, n: usize, kb: usize) -> Result<Partition> {
    let co = co_association(crowd, n)?;
    let dissimilarity: Vec<Vec<f64>> = co
        .values
        .iter()
        .map(|row| row.iter().map(|v| 1.0 - v).collect())
        .collect();
    let dendrogram = average_linkage(&dissimilarity)?;
    consensus_cut(&dendrogram, kb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::AlgorithmDescriptor;

    fn crowd_of(labelings: &[&[usize]]) -> Crowd {
        Crowd {
            members: labelings
                .iter()
                .map(|l| {
                    Partition::from_raw_labels(
                        l.to_vec(),
                        AlgorithmDescriptor::kmeans(),
                        Vec::new(),
                        0,
                    )
                })
                .collect(),
            admission_log: Vec::new(),
        }
    }

    #[test]
    fn three_point_hand_count() {
        // Members {(a,b | c), (a,b,c)}: C(a,b)=1, C(a,c)=C(b,c)=0.5.
        let crowd = crowd_of(&[&[0, 0, 1], &[0, 0, 0]]);
        let co = co_association(&crowd, 3).unwrap();
        assert_eq!(co.values[0][1], 1.0);
        assert_eq!(co.values[0][2], 0.5);
        assert_eq!(co.values[1][2], 0.5);
        for i in 0..3 {
            assert_eq!(co.values[i][i], 1.0);
        }
    }

    #[test]
    fn single_member_matches_indicator() {
        let crowd = crowd_of(&[&[0, 1, 0, 1]]);
        let co = co_association(&crowd, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if crowd.members[0].labels[i] == crowd.members[0].labels[j] {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(co.values[i][j], expected);
            }
        }
    }

    #[test]
    fn identical_members_give_block_matrix() {
        let crowd = crowd_of(&[&[0, 0, 1], &[1, 1, 0], &[0, 0, 1]]);
        let co = co_association(&crowd, 3).unwrap();
        assert_eq!(co.values[0][1], 1.0);
        assert_eq!(co.values[0][2], 0.0);
        assert_eq!(co.values[1][2], 0.0);
    }

    #[test]
    fn empty_crowd_is_domain_error() {
        let crowd = Crowd::default();
        assert!(matches!(
            co_association(&crowd, 3),
            Err(WocceError::Domain(_))
        ));
    }

    #[test]
    fn masked_pairs_without_observations_score_zero() {
        let members = vec![
            vec![Some(0), Some(0), None],
            vec![Some(0), None, Some(0)],
        ];
        let co = co_association_masked(&members, 3).unwrap();
        assert_eq!(co.values[0][1], 1.0);
        assert_eq!(co.values[0][2], 1.0);
        // Samples 1 and 2 never co-occur.
        assert_eq!(co.values[1][2], 0.0);
    }

    #[test]
    fn consensus_of_identical_members_reproduces_them() {
        let crowd = crowd_of(&[&[0, 0, 1, 1], &[1, 1, 0, 0], &[0, 0, 1, 1]]);
        let result = wocce_consensus(&crowd, 4, 2).unwrap();
        assert_eq!(result.labels, vec![0, 0, 1, 1]);
        assert_eq!(result.descriptor, AlgorithmDescriptor::consensus());
        assert!(result.basic_params.is_empty());
    }

    #[test]
    fn three_point_consensus_cut() {
        // Dissimilarities 0, 0.5, 0.5: cut at 2 gives {a,b} vs {c}.
        let crowd = crowd_of(&[&[0, 0, 1], &[0, 0, 0]]);
        let result = wocce_consensus(&crowd, 3, 2).unwrap();
        assert_eq!(result.labels, vec![0, 0, 1]);
    }

    #[test]
    fn consensus_cut_extremes() {
        let crowd = crowd_of(&[&[0, 0, 1], &[0, 1, 1]]);
        assert_eq!(wocce_consensus(&crowd, 3, 1).unwrap().k, 1);
        assert_eq!(wocce_consensus(&crowd, 3, 3).unwrap().labels, vec![0, 1, 2]);
    }

    #[test]
    fn csv_export_is_rectangular() {
        let crowd = crowd_of(&[&[0, 0, 1]]);
        let co = co_association(&crowd, 3).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        co.write_csv(file.path()).unwrap();
        let text = std::fs::read_to_string(file.path()).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.split(',').count() == 3));
    }
}
