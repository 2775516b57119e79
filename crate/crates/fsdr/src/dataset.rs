//! Dataset container, CSV ingestion, spectral transforms, splitting, and the
//! synthetic planted-band generator.
//!
//! Feature positions are 1-based throughout the public surface: position 1 is
//! the first column, position D the last. All sampling operations are pure
//! functions of their inputs and an explicit seed.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;

/// An N x D feature matrix with an N-vector response.
///
/// Invariants enforced at construction: N >= 1, D >= 2, matching lengths, and
/// no non-finite values anywhere.
#[derive(Debug, Clone)]
pub struct Dataset {
    name: String,
    features: Mat,
    response: Vec<f64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, features: Mat, response: Vec<f64>) -> Result<Self> {
        if features.rows() != response.len() {
            return Err(Error::Data(format!(
                "feature rows ({}) != response length ({})",
                features.rows(),
                response.len()
            )));
        }
        if features.rows() < 1 {
            return Err(Error::Data("no samples".into()));
        }
        if features.cols() < 2 {
            return Err(Error::Data(format!(
                "need at least 2 features, got {}",
                features.cols()
            )));
        }
        if let Some(pos) = features.as_slice().iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos / features.cols(), pos % features.cols());
            return Err(Error::Data(format!(
                "non-finite feature value at sample {}, feature position {}",
                r + 1,
                c + 1
            )));
        }
        if let Some(r) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite response value at sample {}",
                r + 1
            )));
        }
        Ok(Self {
            name: name.into(),
            features,
            response,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Mat {
        &self.features
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// 1-based feature positions, always `1..=D`.
    pub fn feature_positions(&self) -> impl Iterator<Item = usize> {
        1..=self.num_features()
    }

    /// Restrict to the given 1-based feature positions (in the given order).
    pub fn select_features(&self, positions: &[usize]) -> Result<Dataset> {
        let cols = positions_to_columns(positions, self.num_features())?;
        let features = self.features.select_columns(&cols)?;
        // A single selected feature is a legal model input even though a
        // full Dataset requires D >= 2, so bypass the constructor check.
        Ok(Dataset {
            name: self.name.clone(),
            features,
            response: self.response.clone(),
        })
    }

    fn subset_rows(&self, rows: &[usize], name: String) -> Dataset {
        let mut features = Mat::zeros(rows.len(), self.num_features());
        let mut response = Vec::with_capacity(rows.len());
        for (k, &r) in rows.iter().enumerate() {
            features.row_mut(k).copy_from_slice(self.features.row(r));
            response.push(self.response[r]);
        }
        Dataset {
            name,
            features,
            response,
        }
    }
}

/// Validate 1-based positions and convert them to 0-based column indices.
pub(crate) fn positions_to_columns(positions: &[usize], d: usize) -> Result<Vec<usize>> {
    if positions.is_empty() {
        return Err(Error::Config("empty feature position list".into()));
    }
    positions
        .iter()
        .map(|&p| {
            if p < 1 || p > d {
                Err(Error::Config(format!(
                    "feature position {p} out of range 1..={d}"
                )))
            } else {
                Ok(p - 1)
            }
        })
        .collect()
}

/// Load a dataset from a headered CSV file. All columns other than
/// `response_column` become features, in file order.
pub fn load_csv(path: impl AsRef<Path>, response_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Data("no samples".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let response_idx = columns
        .iter()
        .position(|&c| c == response_column)
        .ok_or_else(|| {
            Error::Data(format!(
                "response column \"{response_column}\" not found in header"
            ))
        })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut response = Vec::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(Error::Data(format!(
                "line {}: expected {} cells, found {}",
                line_no + 1,
                columns.len(),
                cells.len()
            )));
        }
        let mut row = Vec::with_capacity(columns.len() - 1);
        for (c, cell) in cells.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                Error::Data(format!(
                    "line {}, column \"{}\": cannot parse \"{cell}\" as a number",
                    line_no + 1,
                    columns[c]
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::Data(format!(
                    "line {}, column \"{}\": non-finite value \"{cell}\"",
                    line_no + 1,
                    columns[c]
                )));
            }
            if c == response_idx {
                response.push(value);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data("no samples".into()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Dataset::new(name, Mat::from_rows(&rows)?, response)
}

/// Write a dataset as CSV with headers `band_1..band_D` and a final response
/// column named `response_name`. Output is byte-deterministic.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>, response_name: &str) -> Result<()> {
    let mut out = String::new();
    for j in 1..=dataset.num_features() {
        out.push_str(&format!("band_{j},"));
    }
    out.push_str(response_name);
    out.push('\n');
    for i in 0..dataset.num_samples() {
        for v in dataset.features().row(i) {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", dataset.response()[i]));
    }
    std::fs::write(path.as_ref(), out)?;
    Ok(())
}

/// Replace each absorbance value `a` with reflectance `10^(-a)`.
pub fn absorbance_to_reflectance(dataset: &Dataset) -> Dataset {
    let mut features = dataset.features.clone();
    for v in features.as_mut_slice() {
        *v = 10f64.powf(-*v);
    }
    Dataset {
        name: dataset.name.clone(),
        features,
        response: dataset.response.clone(),
    }
}

/// Length after `levels` stages of ceil-halving.
pub fn downsampled_len(d: usize, levels: u32) -> usize {
    let mut len = d;
    for _ in 0..levels {
        len = len.div_ceil(2);
    }
    len
}

/// Reduce the feature axis by `levels` stages of single-level Haar
/// approximation (mean-preserving pairwise averages). Odd-length stages
/// replicate the final sample before pairing.
pub fn dwt_downsample(dataset: &Dataset, levels: u32) -> Result<Dataset> {
    if levels < 1 {
        return Err(Error::Config("levels must be >= 1".into()));
    }
    let d_out = downsampled_len(dataset.num_features(), levels);
    if d_out < 2 {
        return Err(Error::Data(format!(
            "resulting dimension too small: {} features after {levels} level(s)",
            d_out
        )));
    }
    let mut rows: Vec<Vec<f64>> = (0..dataset.num_samples())
        .map(|i| dataset.features.row(i).to_vec())
        .collect();
    for _ in 0..levels {
        for row in &mut rows {
            let n = row.len();
            let half = n.div_ceil(2);
            let mut next = Vec::with_capacity(half);
            for k in 0..half {
                let a = row[2 * k];
                let b = if 2 * k + 1 < n { row[2 * k + 1] } else { a };
                next.push((a + b) / 2.0);
            }
            *row = next;
        }
    }
    Dataset::new(
        dataset.name.clone(),
        Mat::from_rows(&rows)?,
        dataset.response.clone(),
    )
}

/// Uniform sample of `n` rows without replacement, deterministic under
/// `seed`. Rows are returned in their original order.
pub fn truncate_samples(dataset: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n < 1 || n > dataset.num_samples() {
        return Err(Error::Config(format!(
            "cannot take {n} samples from {}",
            dataset.num_samples()
        )));
    }
    let mut order: Vec<usize> = (0..dataset.num_samples()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut keep: Vec<usize> = order[..n].to_vec();
    keep.sort_unstable();
    Ok(dataset.subset_rows(&keep, dataset.name.clone()))
}

/// Disjoint, exhaustive (train, test) split with `round(N * test_fraction)`
/// test rows, deterministic under `seed`.
pub fn train_test_split(
    dataset: &Dataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test_fraction must be in (0,1), got {test_fraction}"
        )));
    }
    let n = dataset.num_samples();
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(Error::Config(format!(
            "split leaves an empty partition (N={n}, test_fraction={test_fraction})"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test_rows: Vec<usize> = order[..n_test].to_vec();
    let mut train_rows: Vec<usize> = order[n_test..].to_vec();
    test_rows.sort_unstable();
    train_rows.sort_unstable();
    Ok((
        dataset.subset_rows(&train_rows, format!("{}_train", dataset.name)),
        dataset.subset_rows(&test_rows, format!("{}_test", dataset.name)),
    ))
}

/// Recipe for a synthetic planted-band dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    pub n_features: usize,
    /// Ground-truth informative feature positions, 1-based.
    pub planted_bands: Vec<usize>,
    /// Gaussian smoothing kernel width along the feature axis, in index units.
    pub smoothness: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.n_samples < 1 {
            return Err(Error::Config("n_samples must be >= 1".into()));
        }
        if self.n_features < 2 {
            return Err(Error::Config("n_features must be >= 2".into()));
        }
        if !self.smoothness.is_finite() || self.smoothness <= 0.0 {
            return Err(Error::Config("smoothness must be positive".into()));
        }
        if self.noise_std < 0.0 {
            return Err(Error::Config("noise_std must be non-negative".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &b in &self.planted_bands {
            if b < 1 || b > self.n_features {
                return Err(Error::Config(format!(
                    "planted band {b} out of range 1..={}",
                    self.n_features
                )));
            }
            if !seen.insert(b) {
                return Err(Error::Config(format!("planted band {b} repeated")));
            }
        }
        if self.planted_bands.is_empty() {
            return Err(Error::Config("need at least one planted band".into()));
        }
        Ok(())
    }
}

/// Ground truth accompanying a synthetic dataset; serialized as the JSON
/// sidecar next to the generated CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub planted_bands: Vec<usize>,
    pub seed: u64,
    /// Per-band weights of the linear response term.
    pub linear_weights: Vec<f64>,
    /// Per-band weights of the quadratic response term.
    pub quadratic_weights: Vec<f64>,
}

/// The documented synthetic response function:
/// `y = sum_k lin[k] * x[b_k] + sum_k quad[k] * x[b_k]^2` (no noise).
pub fn synthetic_response(features_row: &[f64], truth: &GroundTruth) -> f64 {
    let mut y = 0.0;
    for (k, &b) in truth.planted_bands.iter().enumerate() {
        let x = features_row[b - 1];
        y += truth.linear_weights[k] * x + truth.quadratic_weights[k] * x * x;
    }
    y
}

/// Generate a planted-band dataset: features are Gaussian noise smoothed
/// along the band axis (so nearby bands are strongly correlated, mimicking
/// spectra), squashed to (0,1); the response is a fixed linear+quadratic
/// function of the planted-band values plus Gaussian noise.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, d) = (spec.n_samples, spec.n_features);

    // Truncated Gaussian kernel, renormalized per window so constants are
    // preserved at the edges.
    let radius = (3.0 * spec.smoothness).ceil() as i64;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * spec.smoothness * spec.smoothness)).exp())
        .collect();
    let kernel_sum: f64 = kernel.iter().sum();
    // Variance shrink factor of the full (interior) window; used to bring the
    // smoothed noise back to roughly unit variance before squashing.
    let interior_std = kernel
        .iter()
        .map(|w| (w / kernel_sum) * (w / kernel_sum))
        .sum::<f64>()
        .sqrt();

    let mut features = Mat::zeros(n, d);
    let mut raw = vec![0.0; d];
    for i in 0..n {
        for v in raw.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let row = features.row_mut(i);
        for (j, out) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            let mut wsum = 0.0;
            for (ki, w) in kernel.iter().enumerate() {
                let off = ki as i64 - radius;
                let src = j as i64 + off;
                if src >= 0 && src < d as i64 {
                    acc += w * raw[src as usize];
                    wsum += w;
                }
            }
            let z = (acc / wsum) / interior_std;
            *out = 1.0 / (1.0 + (-z).exp());
        }
    }

    // Two kinds of planted band, both instances of w x + v x^2:
    //   - monotone: v shares w's sign, so the band's two terms reinforce and
    //     the contribution is strongly (also linearly) detectable;
    //   - curved: w = -v puts the parabola's vertex at 0.5, the exact center
    //     of the sigmoid-squashed feature distribution, so the contribution
    //     is non-monotone and carries no linear trace while still holding
    //     real signal.
    // Every third band (k = 2, 5, ...) is curved; the exact weights are
    // published in the ground-truth sidecar.
    let mut linear_weights: Vec<f64> = Vec::with_capacity(spec.planted_bands.len());
    let mut quadratic_weights: Vec<f64> = Vec::with_capacity(spec.planted_bands.len());
    for k in 0..spec.planted_bands.len() {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        if k % 3 == 2 {
            let v = sign * rng.random_range(5.0..7.0);
            linear_weights.push(-v);
            quadratic_weights.push(v);
        } else {
            let w = sign * rng.random_range(0.8..1.5);
            linear_weights.push(w);
            quadratic_weights.push(w.signum() * rng.random_range(0.5..1.5));
        }
    }
    let truth = GroundTruth {
        planted_bands: spec.planted_bands.clone(),
        seed: spec.seed,
        linear_weights,
        quadratic_weights,
    };

    let mut response = Vec::with_capacity(n);
    for i in 0..n {
        let clean = synthetic_response(features.row(i), &truth);
        let noise: f64 = if spec.noise_std > 0.0 {
            spec.noise_std * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        response.push(clean + noise);
    }

    let dataset = Dataset::new(format!("synthetic_{}", spec.seed), features, response)?;
    Ok((dataset, truth))
}

/// Fitted standardization parameters: z-scored response, per-band min-max
/// features. Applying `transform` with these to new data uses the original
/// (training) statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StandardizeParams {
    pub response_mean: f64,
    pub response_std: f64,
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
}

impl StandardizeParams {
    pub fn fit(dataset: &Dataset) -> Result<Self> {
        let n = dataset.num_samples();
        if n < 2 {
            return Err(Error::Data("need at least 2 samples to standardize".into()));
        }
        let mean = dataset.response.iter().sum::<f64>() / n as f64;
        let var = dataset
            .response
            .iter()
            .map(|y| (y - mean) * (y - mean))
            .sum::<f64>()
            / (n - 1) as f64;
        let std = var.sqrt();
        if std == 0.0 {
            return Err(Error::Data("zero-variance response".into()));
        }
        let d = dataset.num_features();
        let mut feature_min = vec![f64::INFINITY; d];
        let mut feature_max = vec![f64::NEG_INFINITY; d];
        for i in 0..n {
            for (j, &v) in dataset.features.row(i).iter().enumerate() {
                feature_min[j] = feature_min[j].min(v);
                feature_max[j] = feature_max[j].max(v);
            }
        }
        Ok(Self {
            response_mean: mean,
            response_std: std,
            feature_min,
            feature_max,
        })
    }

    /// Apply the fitted transform. Constant bands map to 0.5.
    pub fn transform(&self, dataset: &Dataset) -> Result<Dataset> {
        if dataset.num_features() != self.feature_min.len() {
            return Err(Error::Shape(format!(
                "dataset has {} features, params were fit on {}",
                dataset.num_features(),
                self.feature_min.len()
            )));
        }
        let mut features = dataset.features.clone();
        for i in 0..dataset.num_samples() {
            let row = features.row_mut(i);
            for (j, v) in row.iter_mut().enumerate() {
                let range = self.feature_max[j] - self.feature_min[j];
                *v = if range == 0.0 {
                    0.5
                } else {
                    (*v - self.feature_min[j]) / range
                };
            }
        }
        let response = dataset
            .response
            .iter()
            .map(|y| (y - self.response_mean) / self.response_std)
            .collect();
        // Single-feature views produced by select_features are legal here.
        Ok(Dataset {
            name: dataset.name.clone(),
            features,
            response,
        })
    }

    /// Invert the transform, reproducing original units.
    pub fn inverse(&self, dataset: &Dataset) -> Result<Dataset> {
        if dataset.num_features() != self.feature_min.len() {
            return Err(Error::Shape(format!(
                "dataset has {} features, params were fit on {}",
                dataset.num_features(),
                self.feature_min.len()
            )));
        }
        let mut features = dataset.features.clone();
        for i in 0..dataset.num_samples() {
            let row = features.row_mut(i);
            for (j, v) in row.iter_mut().enumerate() {
                let range = self.feature_max[j] - self.feature_min[j];
                *v = self.feature_min[j] + *v * range;
            }
        }
        let response = dataset
            .response
            .iter()
            .map(|z| self.response_to_original(*z))
            .collect();
        Ok(Dataset {
            name: dataset.name.clone(),
            features,
            response,
        })
    }

    /// Map a standardized response value back to original units.
    pub fn response_to_original(&self, z: f64) -> f64 {
        self.response_mean + z * self.response_std
    }
}

/// Standardize a dataset (fit + transform in one step), returning the
/// transform parameters for later inversion or reuse on held-out data.
pub fn standardize(dataset: &Dataset) -> Result<(Dataset, StandardizeParams)> {
    let params = StandardizeParams::fit(dataset)?;
    let transformed = params.transform(dataset)?;
    Ok((transformed, params))
}
