//! Gaussian mixture fit by expectation-maximization with full covariances,
//! initialized from a k-means run and hardened by argmax responsibility.

use super::kmeans::kmeans;
use super::{AlgorithmDescriptor, Partition};
use crate::dataset::Dataset;
use crate::error::{Result, WocceError};

const MAX_ITER: usize = 200;
const LL_TOL: f64 = 1e-6;
const COV_RIDGE: f64 = 1e-6;

pub fn gmm_em(ds: &Dataset, k: usize, seed: u64) -> Result<Partition> {
    Ok(gmm_em_traced(ds, k, seed)?.0)
}

/// Fits the mixture and returns the per-iteration log-likelihood trace
/// (non-decreasing). A collapsed fit is retried once with a derived seed
/// before reporting a degenerate-fit error.
pub fn gmm_em_traced(ds: &Dataset, k: usize, seed: u64) -> Result<(Partition, Vec<f64>)> {
    match fit(ds, k, seed) {
        Ok(result) => Ok(result),
        Err(WocceError::DegenerateFit(_)) => {
            let retry_seed = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
            match fit(ds, k, retry_seed) {
                Ok(result) => Ok(result),
                Err(WocceError::DegenerateFit(msg)) => Err(WocceError::DegenerateFit(format!(
                    "{msg} (after one retry)"
                ))),
                Err(other) => Err(other),
            }
        }
        Err(other) => Err(other),
    }
}

struct Component {
    weight: f64,
    mean: Vec<f64>,
    chol: Vec<Vec<f64>>,
    log_det: f64,
}

fn fit(ds: &Dataset, k: usize, seed: u64) -> Result<(Partition, Vec<f64>)> {
    let n = ds.n();
    let d = ds.d();
    if k < 1 || k > n {
        return Err(WocceError::Size(format!("k={k} out of range 1..={n}")));
    }

    // Initialization from a k-means run on the same data.
    let init = kmeans(ds, k, seed)?;
    let sizes = init.cluster_sizes();
    let mut means = vec![vec![0.0f64; d]; init.k];
    for (row, &label) in ds.features.iter().zip(&init.labels) {
        for (j, v) in row.iter().enumerate() {
            means[label][j] += v;
        }
    }
    for (c, mean) in means.iter_mut().enumerate() {
        for v in mean.iter_mut() {
            *v /= sizes[c] as f64;
        }
    }
    let initial_means = means.clone();

    let mut components: Vec<Component> = Vec::with_capacity(init.k);
    for c in 0..init.k {
        let mut cov = vec![vec![0.0f64; d]; d];
        for (row, &label) in ds.features.iter().zip(&init.labels) {
            if label != c {
                continue;
            }
            for a in 0..d {
                for b in 0..d {
                    cov[a][b] += (row[a] - means[c][a]) * (row[b] - means[c][b]);
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                cov[a][b] /= sizes[c] as f64;
            }
            cov[a][a] += COV_RIDGE;
        }
        let (chol, log_det) = cholesky(&cov)
            .ok_or_else(|| WocceError::DegenerateFit("initial covariance not SPD".into()))?;
        components.push(Component {
            weight: sizes[c] as f64 / n as f64,
            mean: means[c].clone(),
            chol,
            log_det,
        });
    }
    let k = components.len();

    let mut responsibilities = vec![vec![0.0f64; k]; n];
    let mut ll_trace: Vec<f64> = Vec::new();

    for _ in 0..MAX_ITER {
        // E step in log space.
        let mut log_likelihood = 0.0;
        for (i, row) in ds.features.iter().enumerate() {
            let log_terms: Vec<f64> = components
                .iter()
                .map(|comp| {
                    let lw = if comp.weight > 0.0 {
                        comp.weight.ln()
                    } else {
                        f64::NEG_INFINITY
                    };
                    lw + log_gaussian(row, comp, d)
                })
                .collect();
            let lse = log_sum_exp(&log_terms);
            if !lse.is_finite() {
                return Err(WocceError::DegenerateFit(
                    "non-finite likelihood during E step".into(),
                ));
            }
            log_likelihood += lse;
            for c in 0..k {
                responsibilities[i][c] = (log_terms[c] - lse).exp();
            }
        }
        let converged = ll_trace
            .last()
            .map(|prev| log_likelihood - prev < LL_TOL)
            .unwrap_or(false);
        ll_trace.push(log_likelihood);
        if converged {
            break;
        }

        // M step; a starved component keeps its parameters.
        for c in 0..k {
            let weight_sum: f64 = responsibilities.iter().map(|r| r[c]).sum();
            if weight_sum < 1e-10 {
                components[c].weight = weight_sum / n as f64;
                continue;
            }
            let mut mean = vec![0.0f64; d];
            for (row, resp) in ds.features.iter().zip(&responsibilities) {
                for (j, v) in row.iter().enumerate() {
                    mean[j] += resp[c] * v;
                }
            }
            for v in mean.iter_mut() {
                *v /= weight_sum;
            }
            let mut cov = vec![vec![0.0f64; d]; d];
            for (row, resp) in ds.features.iter().zip(&responsibilities) {
                for a in 0..d {
                    for b in 0..d {
                        cov[a][b] += resp[c] * (row[a] - mean[a]) * (row[b] - mean[b]);
                    }
                }
            }
            for a in 0..d {
                for b in 0..d {
                    cov[a][b] /= weight_sum;
                }
                cov[a][a] += COV_RIDGE;
            }
            let (chol, log_det) = cholesky(&cov).ok_or_else(|| {
                WocceError::DegenerateFit("covariance collapse during M step".into())
            })?;
            components[c] = Component {
                weight: weight_sum / n as f64,
                mean,
                chol,
                log_det,
            };
        }
    }

    // Harden by argmax responsibility, ties to the smallest component index.
    let labels: Vec<usize> = responsibilities
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
        AlgorithmDescriptor::gaussian_mixture(),
        initial_means,
        seed,
    );
    Ok((partition, ll_trace))
}

/// log N(x | mean, L L^T) evaluated via the cached Cholesky factor.
fn log_gaussian(x: &[f64], comp: &Component, d: usize) -> f64 {
    // Forward-solve L z = (x - mean).
    let mut z = vec![0.0f64; d];
    for i in 0..d {
        let mut acc = x[i] - comp.mean[i];
        for j in 0..i {
            acc -= comp.chol[i][j] * z[j];
        }
        z[i] = acc / comp.chol[i][i];
    }
    let maha: f64 = z.iter().map(|v| v * v).sum();
    -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + comp.log_det + maha)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Lower-triangular Cholesky factor and log-determinant; `None` when the
/// matrix is not positive definite.
fn cholesky(a: &[Vec<f64>]) -> Option<(Vec<Vec<f64>>, f64)> {
    let d = a.len();
    let mut l = vec![vec![0.0f64; d]; d];
    let mut log_det = 0.0;
    for i in 0..d {
        for j in 0..=i {
            let mut acc = a[i][j];
            for t in 0..j {
                acc -= l[i][t] * l[j][t];
            }
            if i == j {
                if acc <= 0.0 || !acc.is_finite() {
                    return None;
                }
                l[i][j] = acc.sqrt();
                log_det += 2.0 * l[i][j].ln();
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    Some((l, log_det))
}
