//! External evaluation of a predicted labeling against ground truth:
//! relabeling accuracy via optimal assignment, and normalized mutual
//! information.

use crate::error::{Result, WocceError};

fn contingency(a: &[usize], b: &[usize]) -> Vec<Vec<usize>> {
    let ka = a.iter().max().map(|m| m + 1).unwrap_or(0);
    let kb = b.iter().max().map(|m| m + 1).unwrap_or(0);
    let mut table = vec![vec![0usize; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    table
}

/// Minimum-cost perfect assignment on a square cost matrix; returns the
/// column chosen for each row.
fn hungarian_min(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // Potentials-based O(n^3) algorithm, 1-indexed internally.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1]; // row assigned to column j
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            assignment[row_of[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Percentage of samples classified correctly after the optimal one-to-one
/// matching between predicted clusters and true classes (contingency table
/// zero-padded to square).
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(WocceError::Size(format!(
            "{} predictions for {} truth labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(WocceError::Size("accuracy of empty labelings".into()));
    }
    let table = contingency(pred, truth);
    let side = table.len().max(table[0].len());
    let max_count = table
        .iter()
        .flat_map(|r| r.iter())
        .cloned()
        .max()
        .unwrap_or(0) as f64;
    let mut cost = vec![vec![max_count; side]; side];
    for (i, row) in table.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            cost[i][j] = max_count - count as f64;
        }
    }
    let assignment = hungarian_min(&cost);
    let mut matched = 0usize;
    for (i, row) in table.iter().enumerate() {
        let j = assignment[i];
        if j < row.len() {
            matched += row[j];
        }
    }
    Ok(100.0 * matched as f64 / pred.len() as f64)
}

fn entropy(labels: &[usize]) -> f64 {
    let k = labels.iter().max().map(|m| m + 1).unwrap_or(0);
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    let n = labels.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Whether two labelings induce the same set partition (equal up to
/// relabeling).
fn same_set_partition(a: &[usize], b: &[usize]) -> bool {
    let table = contingency(a, b);
    // Each nonempty row and column must contain exactly one nonzero cell.
    let rows_ok = table
        .iter()
        .all(|row| row.iter().filter(|&&c| c > 0).count() <= 1);
    let cols = table[0].len();
    let cols_ok = (0..cols).all(|j| table.iter().filter(|row| row[j] > 0).count() <= 1);
    rows_ok && cols_ok
}

/// Normalized mutual information with geometric-mean normalization:
/// I(a;b) / sqrt(H(a) H(b)), natural logs. When either entropy is zero the
/// value is 1 for identical set partitions and 0 otherwise.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(WocceError::Size(format!(
            "{} labels against {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(WocceError::Size("nmi of empty labelings".into()));
    }
    if same_set_partition(a, b) {
        return Ok(1.0);
    }
    let ha = entropy(a);
    let hb = entropy(b);
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    let n = a.len() as f64;
    let table = contingency(a, b);
    let row_sums: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<usize> = (0..table[0].len())
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect();
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let pij = count as f64 / n;
            let pi = row_sums[i] as f64 / n;
            let pj = col_sums[j] as f64 / n;
            mi += pij * (pij / (pi * pj)).ln();
        }
    }
    Ok((mi / (ha * hb).sqrt()).clamp(0.0, 1.0))
}
