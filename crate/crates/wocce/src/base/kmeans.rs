//! Lloyd's k-means with uniform data-point initialization.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{squared_euclidean, AlgorithmDescriptor, Partition};
use crate::dataset::Dataset;
use crate::error::{Result, WocceError};

const MAX_ITER: usize = 300;

/// Runs k-means from `k` initial centers sampled uniformly without
/// replacement from the data rows.
pub fn kmeans(ds: &Dataset, k: usize, seed: u64) -> Result<Partition> {
    Ok(kmeans_traced(ds, k, seed)?.0)
}

/// Same as [`kmeans`] but also returns the within-cluster sum of squares
/// after every iteration, which is non-increasing.
pub fn kmeans_traced(ds: &Dataset, k: usize, seed: u64) -> Result<(Partition, Vec<f64>)> {
    let n = ds.n();
    if k < 1 || k > n {
        return Err(WocceError::Size(format!("k={k} out of range 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, n, k);
    let centers: Vec<Vec<f64>> = picks.iter().map(|i| ds.features[i].clone()).collect();
    kmeans_from_initial(ds, centers, seed)
}

/// Lloyd iterations from explicit initial centers. The initial centers are
/// recorded as the partition's basic parameters.
pub fn kmeans_from_initial(
    ds: &Dataset,
    initial_centers: Vec<Vec<f64>>,
    seed: u64,
) -> Result<(Partition, Vec<f64>)> {
    let n = ds.n();
    let d = ds.d();
    let k = initial_centers.len();
    if k == 0 || k > n {
        return Err(WocceError::Size(format!("{k} centers for {n} samples")));
    }
    if initial_centers.iter().any(|c| c.len() != d) {
        return Err(WocceError::Size("center dimensionality mismatch".into()));
    }

    let mut centers = initial_centers.clone();
    let mut assign = vec![0usize; n];
    let mut sse_trace = Vec::new();

    for _ in 0..MAX_ITER {
        // Assignment step.
        let mut next_assign = vec![0usize; n];
        for (i, row) in ds.features.iter().enumerate() {
            let mut best = 0;
            let mut best_d = squared_euclidean(row, &centers[0]);
            for (c, center) in centers.iter().enumerate().skip(1) {
                let dist = squared_euclidean(row, center);
                if dist < best_d {
                    best_d = dist;
                    best = c;
                }
            }
            next_assign[i] = best;
        }

        // Reseed empty clusters at the point farthest from its own center,
        // keeping k fixed.
        let mut sizes = vec![0usize; k];
        for &a in &next_assign {
            sizes[a] += 1;
        }
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut worst = None;
            for (i, row) in ds.features.iter().enumerate() {
                if sizes[next_assign[i]] <= 1 {
                    continue;
                }
                let dist = squared_euclidean(row, &centers[next_assign[i]]);
                if worst.map(|(_, wd)| dist > wd).unwrap_or(true) {
                    worst = Some((i, dist));
                }
            }
            if let Some((i, _)) = worst {
                sizes[next_assign[i]] -= 1;
                next_assign[i] = c;
                sizes[c] = 1;
                centers[c] = ds.features[i].clone();
            }
        }

        let converged = next_assign == assign && !sse_trace.is_empty();
        assign = next_assign;

        // Update step.
        let mut sums = vec![vec![0.0; d]; k];
        for (i, row) in ds.features.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                sums[assign[i]][j] += v;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                for j in 0..d {
                    centers[c][j] = sums[c][j] / sizes[c] as f64;
                }
            }
        }

        let sse: f64 = ds
            .features
            .iter()
            .zip(&assign)
            .map(|(row, &a)| squared_euclidean(row, &centers[a]))
            .sum();
        sse_trace.push(sse);

        if converged {
            break;
        }
    }

    let partition = Partition::from_raw_labels(
        assign,
        AlgorithmDescriptor::kmeans(),
        initial_centers,
        seed,
    );
    Ok((partition, sse_trace))
}
