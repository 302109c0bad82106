//! Subtractive (mountain-potential) clustering. The cluster count is
//! emergent: centers are selected by density until the remaining potential
//! falls below the rejection threshold.

use super::{squared_euclidean, AlgorithmDescriptor, Partition};
use crate::dataset::Dataset;
use crate::error::{Result, WocceError};

const ACCEPT_RATIO: f64 = 0.5;
const REJECT_RATIO: f64 = 0.15;
const SQUASH_FACTOR: f64 = 1.5;

/// Chiu-style subtractive clustering with neighborhood radius `radius`.
///
/// Potentials are computed on min-max scaled features so the radius has a
/// consistent meaning across datasets; the selected centers are reported in
/// original coordinates as the partition's basic parameters.
pub fn subtractive(ds: &Dataset, radius: f64) -> Result<Partition> {
    if radius <= 0.0 {
        return Err(WocceError::Config(format!(
            "subtractive radius must be positive, got {radius}"
        )));
    }
    let n = ds.n();
    let scaled = min_max_scale(&ds.features);

    let alpha = 4.0 / (radius * radius);
    let squash = radius * SQUASH_FACTOR;
    let beta = 4.0 / (squash * squash);

    let mut potential: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (-alpha * squared_euclidean(&scaled[i], &scaled[j])).exp())
                .sum()
        })
        .collect();

    let argmax = |p: &[f64]| -> (usize, f64) {
        let mut best = 0;
        for i in 1..p.len() {
            if p[i] > p[best] {
                best = i;
            }
        }
        (best, p[best])
    };

    let (first, first_potential) = argmax(&potential);
    if !first_potential.is_finite() || first_potential <= 0.0 {
        return Err(WocceError::DegenerateFit(
            "no subtractive center found".into(),
        ));
    }
    let mut centers: Vec<usize> = vec![first];

    'outer: loop {
        // Squash potential around the latest accepted center.
        let c = *centers.last().expect("at least one center");
        let c_potential = potential[c];
        for i in 0..n {
            potential[i] -= c_potential * (-beta * squared_euclidean(&scaled[i], &scaled[c])).exp();
        }

        loop {
            let (candidate, value) = argmax(&potential);
            let ratio = value / first_potential;
            if ratio > ACCEPT_RATIO {
                centers.push(candidate);
                continue 'outer;
            }
            if ratio < REJECT_RATIO || value <= 0.0 {
                break 'outer;
            }
            // Gray zone: accept when the candidate is far enough from the
            // existing centers relative to its remaining potential.
            let min_dist = centers
                .iter()
                .map(|&ci| squared_euclidean(&scaled[candidate], &scaled[ci]).sqrt())
                .fold(f64::INFINITY, f64::min);
            if min_dist / radius + ratio >= 1.0 {
                centers.push(candidate);
                continue 'outer;
            }
            potential[candidate] = 0.0;
        }
    }

    // Nearest-center assignment in the scaled space.
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = 0;
            let mut best_d = squared_euclidean(&scaled[i], &scaled[centers[0]]);
            for (c, &ci) in centers.iter().enumerate().skip(1) {
                let d = squared_euclidean(&scaled[i], &scaled[ci]);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect();

    let basic_params: Vec<Vec<f64>> = centers.iter().map(|&c| ds.features[c].clone()).collect();
    Ok(Partition::from_raw_labels(
        labels,
        AlgorithmDescriptor::subtractive(),
        basic_params,
        0,
    ))
}

fn min_max_scale(features: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = features[0].len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in features {
        for (j, &v) in row.iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    features
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| {
                    let range = hi[j] - lo[j];
                    if range > 0.0 {
                        (v - lo[j]) / range
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}
