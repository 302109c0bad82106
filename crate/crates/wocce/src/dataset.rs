//! Dataset loading, normalization, and synthesis.
//!
//! Datasets are dense numeric matrices with optional ground-truth labels.
//! CSV input is plain comma-separated numbers, one sample per row, with an
//! optional header (auto-detected by a non-numeric first row). When labels
//! are requested the last column is read as an integer class id and remapped
//! to contiguous 0-based values.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, WocceError};

/// A labeled or unlabeled sample matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    /// n rows (samples) by d columns (features). Rectangular, finite.
    pub features: Vec<Vec<f64>>,
    /// Ground truth classes, contiguous 0-based, same length as `features`.
    pub labels: Option<Vec<usize>>,
    /// Number of ground-truth classes when labels are present.
    pub k_true: Option<usize>,
    /// Set once every column has mean 0 and unit variance.
    pub normalized: bool,
}

impl Dataset {
    /// Builds a dataset and checks the structural invariants: at least two
    /// rectangular rows, finite entries, and (when present) contiguous labels
    /// covering every class.
    pub fn new(
        name: impl Into<String>,
        features: Vec<Vec<f64>>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = features.len();
        if n < 2 {
            return Err(WocceError::Size(format!(
                "dataset needs at least 2 samples, got {n}"
            )));
        }
        let d = features[0].len();
        if d == 0 {
            return Err(WocceError::Size("dataset needs at least 1 feature".into()));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != d {
                return Err(WocceError::Size(format!(
                    "row {i} has {} features, expected {d}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(WocceError::Size(format!("row {i} has a non-finite entry")));
            }
        }
        let k_true = match &labels {
            Some(ls) => {
                if ls.len() != n {
                    return Err(WocceError::Size(format!(
                        "{} labels for {n} samples",
                        ls.len()
                    )));
                }
                let k = ls.iter().max().map(|m| m + 1).unwrap_or(0);
                let mut seen = vec![false; k];
                for &l in ls {
                    seen[l] = true;
                }
                if seen.iter().any(|s| !s) {
                    return Err(WocceError::Size(
                        "labels are not contiguous: some class in 0..k_true is empty".into(),
                    ));
                }
                Some(k)
            }
            None => None,
        };
        Ok(Dataset {
            name: name.into(),
            features,
            labels,
            k_true,
            normalized: false,
        })
    }

    /// Sample count.
    pub fn n(&self) -> usize {
        self.features.len()
    }

    /// Feature count.
    pub fn d(&self) -> usize {
        self.features[0].len()
    }
}

fn parse_cell(cell: &str, line: usize) -> Result<f64> {
    cell.trim().parse::<f64>().map_err(|_| WocceError::Parse {
        line,
        message: format!("non-numeric cell {cell:?}"),
    })
}

fn is_numeric_row(cells: &[&str]) -> bool {
    cells.iter().all(|c| c.trim().parse::<f64>().is_ok())
}

/// Remaps arbitrary integer class ids to contiguous 0-based ids in order of
/// first occurrence.
fn remap_labels(raw: &[i64]) -> Vec<usize> {
    let mut order: Vec<i64> = Vec::new();
    raw.iter()
        .map(|v| {
            if let Some(pos) = order.iter().position(|o| o == v) {
                pos
            } else {
                order.push(*v);
                order.len() - 1
            }
        })
        .collect()
}

/// Loads a numeric CSV file. With `has_labels` the last column is an integer
/// class label; labels are remapped to contiguous 0-based ids and row order
/// is preserved.
pub fn load_csv(path: impl AsRef<Path>, has_labels: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());

    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<i64> = Vec::new();
    let mut width: Option<usize> = None;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if width.is_none() && !is_numeric_row(&cells) {
            // Header row.
            continue;
        }
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(WocceError::Parse {
                    line: lineno,
                    message: format!("expected {w} columns, found {}", cells.len()),
                })
            }
            _ => {}
        }
        if has_labels && cells.len() < 2 {
            return Err(WocceError::Parse {
                line: lineno,
                message: "labeled rows need at least 2 columns".into(),
            });
        }
        let split = if has_labels {
            cells.len() - 1
        } else {
            cells.len()
        };
        let mut row = Vec::with_capacity(split);
        for cell in &cells[..split] {
            row.push(parse_cell(cell, lineno)?);
        }
        if has_labels {
            let value = parse_cell(cells[split], lineno)?;
            if (value - value.round()).abs() > 1e-9 {
                return Err(WocceError::Parse {
                    line: lineno,
                    message: format!("label {value} is not an integer"),
                });
            }
            raw_labels.push(value.round() as i64);
        }
        features.push(row);
    }

    let labels = has_labels.then(|| remap_labels(&raw_labels));
    Dataset::new(name, features, labels)
}

/// Writes the dataset back out as plain CSV (no header). Labels, when
/// present, go in the last column. Floats use the shortest exact
/// representation so `load_csv` round-trips bit-for-bit.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for (i, row) in ds.features.iter().enumerate() {
        let mut cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(labels) = &ds.labels {
            cells.push(labels[i].to_string());
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Centers and scales each column to mean 0 and unit variance, using the
/// population variance (divisor n). Constant columns become all-zeros.
pub fn zscore_normalize(ds: &Dataset) -> Dataset {
    let n = ds.n() as f64;
    let d = ds.d();
    let mut means = vec![0.0; d];
    for row in &ds.features {
        for (j, v) in row.iter().enumerate() {
            means[j] += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut vars = vec![0.0; d];
    for row in &ds.features {
        for (j, v) in row.iter().enumerate() {
            let dev = v - means[j];
            vars[j] += dev * dev;
        }
    }
    for v in &mut vars {
        *v /= n;
    }
    let features = ds
        .features
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    if vars[j] > 0.0 {
                        (v - means[j]) / vars[j].sqrt()
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Dataset {
        name: ds.name.clone(),
        features,
        labels: ds.labels.clone(),
        k_true: ds.k_true,
        normalized: true,
    }
}

/// Generates the two interleaving half-circles ("half ring") dataset: n/2
/// points per class on unit-radius arcs, plus isotropic Gaussian noise.
/// The second arc is the first flipped vertically and shifted by (1.0, 0.5),
/// which interlocks the two rings so no straight line separates them.
pub fn generate_half_ring(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n % 2 != 0 {
        return Err(WocceError::Size(format!(
            "half-ring sample count must be even, got {n}"
        )));
    }
    if n < 2 {
        return Err(WocceError::Size("half-ring needs at least 2 samples".into()));
    }
    let half = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let step = if half > 1 { PI / (half - 1) as f64 } else { 0.0 };
    let gauss = Normal::new(0.0, 1.0).expect("unit normal");
    let jitter = |rng: &mut ChaCha8Rng| gauss.sample(rng) * noise;
    for i in 0..half {
        let t = step * i as f64;
        features.push(vec![t.cos() + jitter(&mut rng), t.sin() + jitter(&mut rng)]);
        labels.push(0);
    }
    for i in 0..half {
        let t = step * i as f64;
        features.push(vec![
            1.0 - t.cos() + jitter(&mut rng),
            0.5 - t.sin() + jitter(&mut rng),
        ]);
        labels.push(1);
    }
    Dataset::new(format!("halfring-{n}"), features, Some(labels))
}
