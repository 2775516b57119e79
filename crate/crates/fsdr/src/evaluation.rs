//! Benchmarking protocol: train the standardized regressor on selected
//! features and report R²/RMSE/wall time across datasets x selectors x
//! target sizes, plus the two-band pair sweep and the init-vs-final
//! comparison for the gradient-based selector.
//!
//! Metrics are reported in original response units: the evaluator
//! standardizes internally (statistics fitted on the training split only)
//! and inverse-transforms its predictions before scoring.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::baselines::SelectorSpec;
use crate::dataset::{standardize, train_test_split, Dataset, StandardizeParams};
use crate::error::{Error, Result};
use crate::fsdr::{train as fsdr_train, FsdrConfig};
use crate::mlp::{fit_regressor, predict, FitConfig};

/// Coefficient of determination `1 - SS_res / SS_tot`.
pub fn r_squared(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() || predictions.is_empty() {
        return Err(Error::Shape(format!(
            "predictions ({}) and targets ({}) must be equal-length and non-empty",
            predictions.len(),
            targets.len()
        )));
    }
    let n = targets.len() as f64;
    let mean = targets.iter().sum::<f64>() / n;
    let ss_tot: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Data("constant targets".into()));
    }
    let ss_res: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, y)| (p - y) * (p - y))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Root mean square error.
pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() || predictions.is_empty() {
        return Err(Error::Shape(format!(
            "predictions ({}) and targets ({}) must be equal-length and non-empty",
            predictions.len(),
            targets.len()
        )));
    }
    let n = predictions.len() as f64;
    let sse: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, y)| (p - y) * (p - y))
        .sum();
    Ok((sse / n).sqrt())
}

/// Test-set metrics of one trained evaluation model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub r2: f64,
    pub rmse: f64,
}

/// Train a fresh standardized regressor on the train split restricted to
/// `indices` (1-based) and score it on the test split, with an explicit
/// training budget.
pub fn evaluate_selection_with(
    train: &Dataset,
    test: &Dataset,
    indices: &[usize],
    cfg: &FitConfig,
) -> Result<EvalMetrics> {
    if train.num_features() != test.num_features() {
        return Err(Error::Shape(format!(
            "train has {} features, test has {}",
            train.num_features(),
            test.num_features()
        )));
    }
    let train_sel = train.select_features(indices)?;
    let test_sel = test.select_features(indices)?;
    let params = StandardizeParams::fit(&train_sel)?;
    let train_std = params.transform(&train_sel)?;
    let test_std = params.transform(&test_sel)?;

    let model = fit_regressor(train_std.features(), train_std.response(), cfg)?;
    let preds_std = predict(&model, test_std.features())?;
    let preds: Vec<f64> = preds_std
        .iter()
        .map(|&z| params.response_to_original(z))
        .collect();
    Ok(EvalMetrics {
        r2: r_squared(&preds, test.response())?,
        rmse: rmse(&preds, test.response())?,
    })
}

/// [`evaluate_selection_with`] at the standard budget (300 epochs, batch 64,
/// Adam 1e-3), deterministic under `seed`.
pub fn evaluate_selection(
    train: &Dataset,
    test: &Dataset,
    indices: &[usize],
    seed: u64,
) -> Result<EvalMetrics> {
    let cfg = FitConfig {
        seed,
        ..FitConfig::default()
    };
    evaluate_selection_with(train, test, indices, &cfg)
}

/// One benchmark combination. Failed combinations carry an error message and
/// empty metrics instead of aborting the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub dataset: String,
    pub selector: String,
    pub t: usize,
    pub t_prime: usize,
    pub time_s: f64,
    pub r2: Option<f64>,
    pub rmse: Option<f64>,
    pub indices: Vec<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkMeta {
    pub config_hash: String,
    /// Unix timestamp (seconds); excluded from determinism comparisons.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub metadata: BenchmarkMeta,
    pub rows: Vec<BenchmarkRow>,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

impl BenchmarkReport {
    /// Stable column order:
    /// `dataset,selector,t,t_prime,time_s,r2,rmse,indices,seed,error`.
    /// Indices are space-separated inside their cell.
    pub fn to_csv_string(&self) -> String {
        let mut out =
            String::from("dataset,selector,t,t_prime,time_s,r2,rmse,indices,seed,error\n");
        for row in &self.rows {
            let indices = row
                .indices
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let error = row.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                row.dataset,
                row.selector,
                row.t,
                row.t_prime,
                row.time_s,
                fmt_opt(row.r2),
                fmt_opt(row.rmse),
                indices,
                row.seed,
                error
            ));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_csv_string())?;
        Ok(())
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Run every (dataset, selector, target size, seed) combination: 90/10
/// split, standardize the train split, time the selector on it, then score
/// the selection with the standard evaluator. Failures become error rows.
pub fn run_benchmark(
    datasets: &[Dataset],
    selectors: &[SelectorSpec],
    target_sizes: &[usize],
    seeds: &[u64],
) -> Result<BenchmarkReport> {
    if datasets.is_empty() || selectors.is_empty() || target_sizes.is_empty() || seeds.is_empty() {
        return Err(Error::Config(
            "benchmark needs at least one dataset, selector, target size, and seed".into(),
        ));
    }
    let config_desc = serde_json::to_string(&(
        datasets.iter().map(Dataset::name).collect::<Vec<_>>(),
        selectors,
        target_sizes,
        seeds,
    ))?;
    let metadata = BenchmarkMeta {
        config_hash: format!("{:016x}", fnv1a64(config_desc.as_bytes())),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };

    let mut rows = Vec::new();
    for dataset in datasets {
        for &seed in seeds {
            let prep = train_test_split(dataset, 0.1, seed).and_then(|(train, test)| {
                let (train_std, _) = standardize(&train)?;
                Ok((train, test, train_std))
            });
            match prep {
                Err(e) => {
                    for selector in selectors {
                        for &t in target_sizes {
                            rows.push(error_row(dataset.name(), selector.name(), t, seed, &e));
                        }
                    }
                }
                Ok((train, test, train_std)) => {
                    for selector in selectors {
                        for &t in target_sizes {
                            let row = run_combination(
                                &train,
                                &test,
                                &train_std,
                                dataset.name(),
                                selector,
                                t,
                                seed,
                            );
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    Ok(BenchmarkReport { metadata, rows })
}

fn error_row(dataset: &str, selector: &str, t: usize, seed: u64, e: &Error) -> BenchmarkRow {
    BenchmarkRow {
        dataset: dataset.to_string(),
        selector: selector.to_string(),
        t,
        t_prime: 0,
        time_s: 0.0,
        r2: None,
        rmse: None,
        indices: Vec::new(),
        seed,
        error: Some(e.to_string()),
        warnings: Vec::new(),
    }
}

fn run_combination(
    train: &Dataset,
    test: &Dataset,
    train_std: &Dataset,
    dataset_name: &str,
    selector: &SelectorSpec,
    t: usize,
    seed: u64,
) -> BenchmarkRow {
    let selection = match selector.select(train_std, t, seed) {
        Ok(s) => s,
        Err(e) => return error_row(dataset_name, selector.name(), t, seed, &e),
    };
    let metrics = evaluate_selection(train, test, &selection.selected, seed);
    match metrics {
        Ok(m) => BenchmarkRow {
            dataset: dataset_name.to_string(),
            selector: selector.name().to_string(),
            t,
            t_prime: selection.t_prime,
            time_s: selection.wall_time_s,
            r2: Some(m.r2),
            rmse: Some(m.rmse),
            indices: selection.selected,
            seed,
            error: None,
            warnings: selection.warnings,
        },
        Err(e) => {
            let mut row = error_row(dataset_name, selector.name(), t, seed, &e);
            row.t_prime = selection.t_prime;
            row.time_s = selection.wall_time_s;
            row.indices = selection.selected;
            row.warnings = selection.warnings;
            row
        }
    }
}

/// Predictive value of the initialized index set versus the trained one,
/// each scored with a separate freshly initialized evaluation model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitFinalComparison {
    pub r2_init: f64,
    pub r2_final: f64,
    pub rmse_init: f64,
    pub rmse_final: f64,
    pub initial: Vec<usize>,
    pub selected: Vec<usize>,
}

/// Split, standardize the train side, run index training on it, then score
/// both the initial and the final integer index sets on the held-out split.
pub fn compare_init_final(
    dataset: &Dataset,
    t: usize,
    config: &FsdrConfig,
    seed: u64,
) -> Result<InitFinalComparison> {
    let (train, test) = train_test_split(dataset, 0.1, seed)?;
    let (train_std, _) = standardize(&train)?;
    let (result, _) = fsdr_train(&train_std, t, config)?;
    let initial = result
        .initial
        .clone()
        .expect("index training always records its initialization");
    let init_metrics = evaluate_selection(&train, &test, &initial, seed)?;
    let final_metrics = evaluate_selection(&train, &test, &result.selected, seed)?;
    Ok(InitFinalComparison {
        r2_init: init_metrics.r2,
        r2_final: final_metrics.r2,
        rmse_init: init_metrics.rmse,
        rmse_final: final_metrics.rmse,
        initial,
        selected: result.selected,
    })
}

/// Training budget used per pair in [`pair_sweep`]; far smaller than the
/// standard evaluator because the sweep trains O(D²) models.
pub const PAIR_SWEEP_EPOCHS: usize = 50;

/// Maximum feature count accepted by [`pair_sweep`].
pub const PAIR_SWEEP_MAX_FEATURES: usize = 128;

/// Upper-triangular grid of test R² over all two-band combinations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSweepGrid {
    pub num_features: usize,
    /// `r2[i][j]` holds the score for 1-based bands (i+1, j+1), j > i.
    pub r2: Vec<Vec<Option<f64>>>,
    /// Mean |Δ R²| between horizontally adjacent filled cells.
    pub mean_adjacent_delta: f64,
    pub seed: u64,
}

impl PairSweepGrid {
    pub fn evaluated_pairs(&self) -> usize {
        self.r2
            .iter()
            .map(|row| row.iter().filter(|c| c.is_some()).count())
            .sum()
    }

    /// Rectangular CSV: header row of band indices, one row per first band,
    /// empty cells on and below the diagonal.
    pub fn to_csv_string(&self) -> String {
        let d = self.num_features;
        let mut out = String::from("band");
        for j in 1..=d {
            out.push_str(&format!(",{j}"));
        }
        out.push('\n');
        for i in 0..d {
            out.push_str(&(i + 1).to_string());
            for j in 0..d {
                match self.r2[i][j] {
                    Some(v) => out.push_str(&format!(",{v}")),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_csv_string())?;
        Ok(())
    }
}

/// Evaluate every band pair (i, j), i < j, with a reduced-budget regressor.
/// Guarded to small feature counts; downsample first for anything larger.
pub fn pair_sweep(dataset: &Dataset, seed: u64) -> Result<PairSweepGrid> {
    let d = dataset.num_features();
    if d > PAIR_SWEEP_MAX_FEATURES {
        return Err(Error::Config(format!(
            "pair sweep over {d} bands would train {} models; reduce the feature \
             axis first (e.g. DWT downsampling) to at most {PAIR_SWEEP_MAX_FEATURES}",
            d * (d - 1) / 2
        )));
    }
    let (train, test) = train_test_split(dataset, 0.1, seed)?;
    let cfg = FitConfig {
        epochs: PAIR_SWEEP_EPOCHS,
        seed,
        ..FitConfig::default()
    };
    let mut r2 = vec![vec![None; d]; d];
    for i in 1..=d {
        for j in i + 1..=d {
            let metrics = evaluate_selection_with(&train, &test, &[i, j], &cfg)?;
            r2[i - 1][j - 1] = Some(metrics.r2);
        }
    }
    let mut delta_sum = 0.0;
    let mut delta_count = 0usize;
    for row in &r2 {
        for j in 0..d.saturating_sub(1) {
            if let (Some(a), Some(b)) = (row[j], row[j + 1]) {
                delta_sum += (b - a).abs();
                delta_count += 1;
            }
        }
    }
    Ok(PairSweepGrid {
        num_features: d,
        r2,
        mean_adjacent_delta: if delta_count == 0 {
            0.0
        } else {
            delta_sum / delta_count as f64
        },
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, SyntheticSpec};
    use crate::mat::Mat;
    use crate::mlp::mse_loss;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn r_squared_closed_forms() {
        let targets = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(r_squared(&targets, &targets).unwrap(), 1.0);
        let mean = [2.5, 2.5, 2.5, 2.5];
        assert_eq!(r_squared(&mean, &targets).unwrap(), 0.0);
        assert!(r_squared(&[1.0, 2.0], &[3.0, 3.0]).is_err());
    }

    #[test]
    fn four_point_fixture() {
        // errors 1, 0, -1, 0; SS_res = 2; mean 2.5; SS_tot = 11.
        let preds = [1.0, 2.0, 3.0, 4.0];
        let targets = [0.0, 2.0, 4.0, 4.0];
        let r2 = r_squared(&preds, &targets).unwrap();
        assert!((r2 - 9.0 / 11.0).abs() < 1e-15, "{r2}");
        let e = rmse(&preds, &targets).unwrap();
        assert!((e - 0.5f64.sqrt()).abs() < 1e-15, "{e}");
    }

    #[test]
    fn rmse_closed_forms_and_mse_consistency() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let e = rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((e - 12.5f64.sqrt()).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let preds: Vec<f64> = (0..32).map(|_| rng.random_range(-2.0..2.0)).collect();
        let targets: Vec<f64> = (0..32).map(|_| rng.random_range(-2.0..2.0)).collect();
        let e = rmse(&preds, &targets).unwrap();
        let (mse, _) = mse_loss(&preds, &targets).unwrap();
        assert!((e * e - mse).abs() < 1e-12);
    }

    fn linear_dataset(n: usize, d: usize, noise: f64, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut features = Mat::zeros(n, d);
        for v in features.as_mut_slice() {
            *v = rng.random_range(0.0..1.0);
        }
        let response: Vec<f64> = (0..n)
            .map(|i| {
                2.0 * features.at(i, 0) - features.at(i, 1)
                    + 0.5 * features.at(i, 2.min(d - 1))
                    + noise * rng.random_range(-1.0..1.0)
            })
            .collect();
        Dataset::new("linear", features, response).unwrap()
    }

    #[test]
    fn all_features_on_noiseless_linear_data_score_high() {
        let ds = linear_dataset(300, 4, 0.0, 31);
        let (train, test) = train_test_split(&ds, 0.1, 1).unwrap();
        let all: Vec<usize> = (1..=4).collect();
        let m = evaluate_selection(&train, &test, &all, 7).unwrap();
        assert!(m.r2 > 0.99, "r2 = {}", m.r2);
    }

    #[test]
    fn pure_noise_feature_scores_low_and_eval_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 300;
        let mut features = Mat::zeros(n, 2);
        for v in features.as_mut_slice() {
            *v = rng.random_range(0.0..1.0);
        }
        let response: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ds = Dataset::new("noise", features, response).unwrap();
        let (train, test) = train_test_split(&ds, 0.1, 2).unwrap();
        let a = evaluate_selection(&train, &test, &[1], 5).unwrap();
        let b = evaluate_selection(&train, &test, &[1], 5).unwrap();
        assert_eq!(a.r2, b.r2);
        assert_eq!(a.rmse, b.rmse);
        assert!(a.r2 < 0.1, "r2 = {}", a.r2);
    }

    #[test]
    fn benchmark_grid_shape_and_error_rows() {
        let ds = linear_dataset(80, 8, 0.05, 3);
        let selectors = [SelectorSpec::mi_default(), SelectorSpec::lasso_default()];
        let report = run_benchmark(&[ds], &selectors, &[2, 50], &[1]).unwrap();
        assert_eq!(report.rows.len(), 4);
        let errors: Vec<_> = report.rows.iter().filter(|r| r.error.is_some()).collect();
        assert_eq!(errors.len(), 2, "t=50 > D should fail for both selectors");
        for row in &report.rows {
            if row.error.is_none() {
                assert!(row.r2.is_some());
                assert!(row.t_prime <= row.t);
            }
        }
        let csv = report.to_csv_string();
        assert!(csv.starts_with("dataset,selector,t,t_prime,time_s,r2,rmse,indices,seed,error\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn full_grid_has_one_row_per_combination() {
        let spec = SyntheticSpec {
            n_samples: 100,
            n_features: 24,
            planted_bands: vec![7, 17],
            smoothness: 3.0,
            noise_std: 0.05,
            seed: 2,
        };
        let (ds, _) = generate_synthetic(&spec).unwrap();
        let selectors = [
            SelectorSpec::Fsdr {
                epochs: 10,
                batch_size: 32,
                network_lr: 1e-3,
                index_lr: 1e-3,
            },
            SelectorSpec::mi_default(),
            SelectorSpec::sfs_default(),
            SelectorSpec::lasso_default(),
        ];
        let report = run_benchmark(&[ds], &selectors, &[2, 5, 10, 15, 20], &[1]).unwrap();
        assert_eq!(report.rows.len(), 20);
        assert!(report.rows.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn benchmark_metrics_are_reproducible() {
        let ds = linear_dataset(80, 6, 0.05, 9);
        let selectors = [SelectorSpec::mi_default()];
        let a = run_benchmark(std::slice::from_ref(&ds), &selectors, &[3], &[4]).unwrap();
        let b = run_benchmark(std::slice::from_ref(&ds), &selectors, &[3], &[4]).unwrap();
        assert_eq!(a.metadata.config_hash, b.metadata.config_hash);
        assert_eq!(a.rows[0].r2, b.rows[0].r2);
        assert_eq!(a.rows[0].rmse, b.rows[0].rmse);
        assert_eq!(a.rows[0].indices, b.rows[0].indices);
    }

    #[test]
    fn benchmark_rejects_empty_inputs() {
        let ds = linear_dataset(40, 4, 0.0, 1);
        assert!(run_benchmark(&[], &[SelectorSpec::mi_default()], &[2], &[1]).is_err());
        assert!(run_benchmark(std::slice::from_ref(&ds), &[], &[2], &[1]).is_err());
        assert!(run_benchmark(
            std::slice::from_ref(&ds),
            &[SelectorSpec::mi_default()],
            &[],
            &[1]
        )
        .is_err());
    }

    #[test]
    fn zero_epoch_training_gives_equal_init_and_final() {
        let spec = SyntheticSpec {
            n_samples: 60,
            n_features: 32,
            planted_bands: vec![8, 24],
            smoothness: 3.0,
            noise_std: 0.02,
            seed: 13,
        };
        let (ds, _) = generate_synthetic(&spec).unwrap();
        let config = FsdrConfig {
            epochs: 0,
            batch_size: 16,
            ..Default::default()
        };
        let cmp = compare_init_final(&ds, 2, &config, 5).unwrap();
        assert_eq!(cmp.initial, cmp.selected);
        assert_eq!(cmp.r2_init, cmp.r2_final);
    }

    #[test]
    fn pair_sweep_counts_and_guard() {
        let ds = linear_dataset(60, 3, 0.05, 21);
        let grid = pair_sweep(&ds, 2).unwrap();
        assert_eq!(grid.evaluated_pairs(), 3);
        assert!(grid.r2[0][1].is_some());
        assert!(grid.r2[1][0].is_none());
        assert!(grid.r2[0][0].is_none());
        let csv = grid.to_csv_string();
        assert_eq!(csv.lines().count(), 4);
        for line in csv.lines() {
            assert_eq!(line.split(',').count(), 4);
        }

        let big = linear_dataset(10, 129, 0.0, 1);
        let err = pair_sweep(&big, 1).unwrap_err().to_string();
        assert!(err.contains("downsampl"), "{err}");
    }
}
