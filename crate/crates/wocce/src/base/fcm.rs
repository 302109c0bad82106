//! Fuzzy c-means with fuzzifier 2, hardened by argmax membership.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{squared_euclidean, AlgorithmDescriptor, Partition};
use crate::dataset::Dataset;
use crate::error::{Result, WocceError};

const MAX_ITER: usize = 200;
const TOL: f64 = 1e-5;

pub fn fuzzy_cmeans(ds: &Dataset, k: usize, seed: u64) -> Result<Partition> {
    Ok(fuzzy_cmeans_traced(ds, k, seed)?.0)
}

/// Returns the hardened partition plus the fuzzy objective after each
/// iteration (non-increasing).
pub fn fuzzy_cmeans_traced(ds: &Dataset, k: usize, seed: u64) -> Result<(Partition, Vec<f64>)> {
    let n = ds.n();
    let d = ds.d();
    if k < 1 || k > n {
        return Err(WocceError::Size(format!("k={k} out of range 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, n, k);
    let initial_centers: Vec<Vec<f64>> = picks.iter().map(|i| ds.features[i].clone()).collect();

    let mut centers = initial_centers.clone();
    let mut memberships = vec![vec![0.0f64; k]; n];
    let mut objective_trace = Vec::new();

    for _ in 0..MAX_ITER {
        // Membership update: u_ic = 1 / sum_l (d_ic / d_il)^2 for fuzzifier 2.
        let mut max_delta: f64 = 0.0;
        for (i, row) in ds.features.iter().enumerate() {
            let dists: Vec<f64> = centers
                .iter()
                .map(|c| squared_euclidean(row, c))
                .collect();
            let new_memberships: Vec<f64> = if let Some(hit) =
                dists.iter().position(|&d2| d2 == 0.0)
            {
                (0..k).map(|c| if c == hit { 1.0 } else { 0.0 }).collect()
            } else {
                let inv_sum: f64 = dists.iter().map(|&d2| 1.0 / d2).sum();
                dists.iter().map(|&d2| 1.0 / (d2 * inv_sum)).collect()
            };
            for c in 0..k {
                max_delta = max_delta.max((new_memberships[c] - memberships[i][c]).abs());
            }
            memberships[i] = new_memberships;
        }

        // Center update from squared memberships.
        let mut weights = vec![0.0f64; k];
        let mut sums = vec![vec![0.0f64; d]; k];
        for (i, row) in ds.features.iter().enumerate() {
            for c in 0..k {
                let w = memberships[i][c] * memberships[i][c];
                weights[c] += w;
                for (j, v) in row.iter().enumerate() {
                    sums[c][j] += w * v;
                }
            }
        }
        for c in 0..k {
            if weights[c] > 0.0 {
                for j in 0..d {
                    centers[c][j] = sums[c][j] / weights[c];
                }
            }
        }

        // Objective evaluated at the updated centers so the recorded
        // sequence is monotone.
        let mut objective = 0.0;
        for (i, row) in ds.features.iter().enumerate() {
            for c in 0..k {
                objective += memberships[i][c] * memberships[i][c]
                    * squared_euclidean(row, &centers[c]);
            }
        }
        objective_trace.push(objective);

        if max_delta < TOL && objective_trace.len() > 1 {
            break;
        }
    }

    // Harden by argmax membership, ties to the smallest cluster index.
    let labels: Vec<usize> = memberships
        .iter()
        .map(|row| {
            let mut best = 0;
            for c in 1..k {
                if row[c] > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect();

    let partition = Partition::from_raw_labels(
        labels,
        AlgorithmDescriptor::fuzzy_cmeans(),
        initial_centers,
        seed,
    );
    Ok((partition, objective_trace))
}
