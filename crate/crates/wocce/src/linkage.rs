//! Agglomerative clustering over a precomputed dissimilarity matrix using
//! Lance-Williams updates, plus dendrogram cutting.
//!
//! Node ids follow the usual stepwise convention: leaves are 0..n-1 and the
//! cluster created by merge t gets id n+t. All tie-breaking is deterministic
//! so repeated runs produce identical dendrograms.

use crate::error::{Result, WocceError};

/// Linkage criterion for merging clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum LinkageMethod {
    Single,
    Average,
    Complete,
    Ward,
}

/// One agglomeration step: `left` and `right` are node ids, `id` is the node
/// id of the merged cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub id: usize,
}

/// Stepwise dendrogram: n-1 merges over n leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Cluster assignment with exactly `k` clusters, obtained by undoing the
    /// k-1 merges performed last (the highest ones under a monotone
    /// linkage). Labels are contiguous by first occurrence.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_leaves;
        if k < 1 || k > n {
            return Err(WocceError::Size(format!(
                "cut k={k} out of range 1..={n}"
            )));
        }
        // Union-find over the first n-k merges.
        let mut parent: Vec<usize> = (0..2 * n - 1).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for merge in &self.merges[..n - k] {
            let a = find(&mut parent, merge.left);
            let b = find(&mut parent, merge.right);
            parent[a] = merge.id;
            parent[b] = merge.id;
        }
        let mut labels = vec![usize::MAX; n];
        let mut next = 0;
        let mut root_label = vec![usize::MAX; 2 * n - 1];
        for i in 0..n {
            let root = find(&mut parent, i);
            if root_label[root] == usize::MAX {
                root_label[root] = next;
                next += 1;
            }
            labels[i] = root_label[root];
        }
        Ok(labels)
    }
}

/// Runs bottom-up agglomeration on a symmetric dissimilarity matrix.
///
/// Ties on merge height are broken by the lexicographically smallest pair of
/// node ids. Ward updates use the size-weighted recurrence on squared
/// distances, applied to whatever matrix is given.
pub fn agglomerate(dissimilarity: &[Vec<f64>], method: LinkageMethod) -> Result<Dendrogram> {
    let n = dissimilarity.len();
    if n < 2 {
        return Err(WocceError::Size(
            "agglomeration needs at least 2 points".into(),
        ));
    }
    for (i, row) in dissimilarity.iter().enumerate() {
        if row.len() != n {
            return Err(WocceError::Size(format!(
                "dissimilarity row {i} has length {}, expected {n}",
                row.len()
            )));
        }
    }

    // Working copy indexed by slot; merged clusters keep the lower slot.
    let mut dist: Vec<Vec<f64>> = dissimilarity.to_vec();
    let mut active: Vec<bool> = vec![true; n];
    let mut size: Vec<f64> = vec![1.0; n];
    let mut node_id: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        // Global minimum with deterministic tie-breaking on node id pairs.
        let mut best: Option<(f64, (usize, usize), (usize, usize))> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !active[j] {
                    continue;
                }
                let d = dist[i][j];
                let ids = if node_id[i] < node_id[j] {
                    (node_id[i], node_id[j])
                } else {
                    (node_id[j], node_id[i])
                };
                let better = match &best {
                    None => true,
                    Some((bd, bids, _)) => d < *bd || (d == *bd && ids < *bids),
                };
                if better {
                    best = Some((d, ids, (i, j)));
                }
            }
        }
        let (height, ids, (i, j)) = best.expect("at least one active pair");

        let (ni, nj) = (size[i], size[j]);
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let (dki, dkj) = (dist[k][i], dist[k][j]);
            let updated = match method {
                LinkageMethod::Single => dki.min(dkj),
                LinkageMethod::Complete => dki.max(dkj),
                LinkageMethod::Average => (ni * dki + nj * dkj) / (ni + nj),
                LinkageMethod::Ward => {
                    let nk = size[k];
                    let total = ni + nj + nk;
                    (((ni + nk) * dki * dki + (nj + nk) * dkj * dkj
                        - nk * height * height)
                        / total)
                        .max(0.0)
                        .sqrt()
                }
            };
            dist[k][i] = updated;
            dist[i][k] = updated;
        }
        active[j] = false;
        size[i] += size[j];
        merges.push(Merge {
            left: ids.0,
            right: ids.1,
            height,
            id: n + step,
        });
        node_id[i] = n + step;
    }

    Ok(Dendrogram {
        n_leaves: n,
        merges,
    })
}
