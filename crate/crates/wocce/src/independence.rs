//! Pairwise partition independence from initialization parameters.
//!
//! Partitions from different algorithm types are fully independent. Within
//! a type, similarity of the basic-parameter matrices is measured by a
//! greedy min-distance row/column elimination (likeness), and independence
//! is its complement.

use crate::base::Partition;
use crate::error::{Result, WocceError};

/// Similarity in [0,1] of two equally-shaped basic-parameter matrices.
///
/// Build the pairwise Euclidean distance matrix between rows of `a` and
/// rows of `b`; repeatedly remove the minimum entry's row and column,
/// summing the minima; the result is `1 - sum / max_distance`, clamped at 0
/// (the sum can exceed the maximum for more than one row). Equal minima
/// resolve to the smallest row index, then the smallest column index.
pub fn likeness(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let m = a.len();
    if m == 0 || b.len() != m {
        return Err(WocceError::Size(format!(
            "likeness needs equal nonempty parameter sets, got {m} and {}",
            b.len()
        )));
    }
    let d = a[0].len();
    if a.iter().chain(b.iter()).any(|row| row.len() != d) {
        return Err(WocceError::Size(
            "likeness parameter rows have mixed widths".into(),
        ));
    }

    let mut dist = vec![vec![0.0f64; m]; m];
    let mut max_dis = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let dd: f64 = a[i]
                .iter()
                .zip(&b[j])
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            dist[i][j] = dd;
            max_dis = max_dis.max(dd);
        }
    }
    if max_dis == 0.0 {
        return Ok(1.0);
    }

    let mut row_alive = vec![true; m];
    let mut col_alive = vec![true; m];
    let mut sum = 0.0;
    for _ in 0..m {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..m {
            if !row_alive[i] {
                continue;
            }
            for j in 0..m {
                if !col_alive[j] {
                    continue;
                }
                if best.map(|(bd, _, _)| dist[i][j] < bd).unwrap_or(true) {
                    best = Some((dist[i][j], i, j));
                }
            }
        }
        let (min, i, j) = best.expect("alive entry");
        sum += min;
        row_alive[i] = false;
        col_alive[j] = false;
    }

    Ok((1.0 - sum / max_dis).clamp(0.0, 1.0))
}

/// Sorts parameter rows lexicographically and truncates both to the shorter
/// length; used when same-type partitions carry different cluster counts.
fn align_params(a: &[Vec<f64>], b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let sort = |rows: &[Vec<f64>]| {
        let mut sorted = rows.to_vec();
        sorted.sort_by(|x, y| {
            x.iter()
                .zip(y)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        sorted
    };
    let mut sa = sort(a);
    let mut sb = sort(b);
    let m = sa.len().min(sb.len());
    sa.truncate(m);
    sb.truncate(m);
    (sa, sb)
}

/// Degree of independence between two partitions in [0,1]: 1 across
/// algorithm types; within a type, the complement of the basic-parameter
/// likeness. Same-type partitions without basic parameters (deterministic
/// algorithms) are fully dependent.
pub fn bpi(p1: &Partition, p2: &Partition) -> Result<f64> {
    if p1.descriptor != p2.descriptor {
        return Ok(1.0);
    }
    match (p1.basic_params.is_empty(), p2.basic_params.is_empty()) {
        (true, true) => Ok(0.0),
        (false, false) => {
            if p1.basic_params.len() == p2.basic_params.len() {
                Ok(1.0 - likeness(&p1.basic_params, &p2.basic_params)?)
            } else {
                let (a, b) = align_params(&p1.basic_params, &p2.basic_params);
                Ok(1.0 - likeness(&a, &b)?)
            }
        }
        _ => Err(WocceError::Inconsistent(format!(
            "same-type partitions ({}) with mismatched basic-parameter presence",
            p1.descriptor
        ))),
    }
}

/// Mean bpi of a candidate against the crowd; an empty crowd scores 1 so
/// the first candidate can always be admitted.
pub fn independence(p: &Partition, crowd: &[Partition]) -> Result<f64> {
    if crowd.is_empty() {
        return Ok(1.0);
    }
    let mut total = 0.0;
    for member in crowd {
        total += bpi(p, member)?;
    }
    Ok(total / crowd.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{AlgorithmDescriptor, DistanceMetric, Partition};
    use crate::linkage::LinkageMethod;

    fn with_params(desc: AlgorithmDescriptor, params: Vec<Vec<f64>>) -> Partition {
        Partition::from_raw_labels(vec![0, 1], desc, params, 0)
    }

    #[test]
    fn likeness_identical_matrices_is_one() {
        let a = vec![vec![1.0, 2.0], vec![-3.0, 0.5]];
        assert_eq!(likeness(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn likeness_hand_trace() {
        // LMAT = ((0,3),(1,2)): MaxDis 3, eliminate 0 then 2, 1 - 2/3 = 1/3.
        let a = vec![vec![0.0], vec![1.0]];
        let b = vec![vec![0.0], vec![3.0]];
        assert!((likeness(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn likeness_single_rows_at_max_distance_is_zero() {
        let a = vec![vec![0.0]];
        let b = vec![vec![5.0]];
        assert_eq!(likeness(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn likeness_rejects_shape_mismatch() {
        let a = vec![vec![0.0]];
        let b = vec![vec![0.0], vec![1.0]];
        assert!(matches!(likeness(&a, &b), Err(WocceError::Size(_))));
        assert!(matches!(likeness(&[], &[]), Err(WocceError::Size(_))));
    }

    #[test]
    fn bpi_cross_type_is_one() {
        let km = with_params(AlgorithmDescriptor::kmeans(), vec![vec![0.0]]);
        let hier = with_params(
            AlgorithmDescriptor::hierarchical(LinkageMethod::Ward, DistanceMetric::Cosine),
            Vec::new(),
        );
        assert_eq!(bpi(&km, &hier).unwrap(), 1.0);
    }

    #[test]
    fn bpi_same_type_uses_likeness_complement() {
        let a = with_params(
            AlgorithmDescriptor::kmeans(),
            vec![vec![0.0], vec![1.0]],
        );
        let b = with_params(
            AlgorithmDescriptor::kmeans(),
            vec![vec![0.0], vec![3.0]],
        );
        assert!((bpi(&a, &b).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bpi_deterministic_duplicates_are_dependent() {
        let desc =
            AlgorithmDescriptor::hierarchical(LinkageMethod::Single, DistanceMetric::Euclidean);
        let a = with_params(desc, Vec::new());
        let b = with_params(desc, Vec::new());
        assert_eq!(bpi(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn bpi_mixed_param_presence_is_inconsistent() {
        let a = with_params(AlgorithmDescriptor::kmeans(), vec![vec![0.0]]);
        let b = with_params(AlgorithmDescriptor::kmeans(), Vec::new());
        assert!(matches!(bpi(&a, &b), Err(WocceError::Inconsistent(_))));
    }

    #[test]
    fn bpi_different_cluster_counts_align_by_sorted_prefix() {
        let a = with_params(
            AlgorithmDescriptor::kmeans(),
            vec![vec![5.0], vec![0.0], vec![1.0]],
        );
        let b = with_params(
            AlgorithmDescriptor::kmeans(),
            vec![vec![3.0], vec![0.0]],
        );
        // Sorted prefixes: ((0),(1)) vs ((0),(3)), the hand-trace case.
        assert!((bpi(&a, &b).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn independence_conventions() {
        let a = with_params(
            AlgorithmDescriptor::kmeans(),
            vec![vec![0.0], vec![1.0]],
        );
        assert_eq!(independence(&a, &[]).unwrap(), 1.0);
        // Crowd BPIs {1, 0.5} average to 0.75: a cross-type member plus a
        // same-type member whose LMAT is ((0,2),(1,1)) so likeness is 0.5.
        let different = with_params(
            AlgorithmDescriptor::hierarchical(
                LinkageMethod::Average,
                DistanceMetric::Euclidean,
            ),
            Vec::new(),
        );
        let same_halfway = with_params(
            AlgorithmDescriptor::kmeans(),
            vec![vec![0.0], vec![2.0]],
        );
        assert!((bpi(&a, &same_halfway).unwrap() - 0.5).abs() < 1e-12);
        let crowd = vec![different, same_halfway];
        let score = independence(&a, &crowd).unwrap();
        assert!((score - 0.75).abs() < 1e-12);
    }

    #[test]
    fn independence_all_cross_type_is_one() {
        let a = with_params(AlgorithmDescriptor::kmeans(), vec![vec![0.0]]);
        let crowd = vec![
            with_params(AlgorithmDescriptor::fuzzy_cmeans(), vec![vec![0.0]]),
            with_params(AlgorithmDescriptor::gaussian_mixture(), vec![vec![0.0]]),
        ];
        assert_eq!(independence(&a, &crowd).unwrap(), 1.0);
    }
}
