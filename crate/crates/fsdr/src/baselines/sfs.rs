//! Sequential forward selection: greedily add the feature that maximizes
//! inner-model validation R² on a fixed 80/20 split.
//!
//! The default inner model is ridge regression (λ = 1e-3), which keeps the
//! wrapper tractable; the standardized MLP regressor is available as the
//! slow, protocol-faithful path.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::solve_linear_system;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::mlp::{fit_regressor, predict, FitConfig};

const RIDGE_LAMBDA: f64 = 1e-3;

/// Inner model scored at every greedy step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerModel {
    Ridge,
    Mlp,
}

/// Selection outcome preserving the greedy pick order.
#[derive(Debug, Clone)]
pub struct SfsSelection {
    /// 1-based feature positions in the order they were added.
    pub pick_order: Vec<usize>,
    pub warnings: Vec<String>,
}

struct InnerSplit {
    train_rows: Vec<usize>,
    val_rows: Vec<usize>,
}

fn inner_split(n: usize, seed: u64) -> Result<InnerSplit> {
    if n < 2 {
        return Err(Error::Data("need at least 2 samples for SFS".into()));
    }
    let n_val = (n / 5).max(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(InnerSplit {
        val_rows: order[..n_val].to_vec(),
        train_rows: order[n_val..].to_vec(),
    })
}

fn r2(preds: &[f64], targets: &[f64]) -> Result<f64> {
    let n = targets.len() as f64;
    let mean = targets.iter().sum::<f64>() / n;
    let ss_tot: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Data("constant validation targets".into()));
    }
    let ss_res: f64 = preds
        .iter()
        .zip(targets)
        .map(|(p, y)| (p - y) * (p - y))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

fn gather_rows(dataset: &Dataset, rows: &[usize], cols: &[usize]) -> Mat {
    let mut out = Mat::zeros(rows.len(), cols.len());
    for (ri, &r) in rows.iter().enumerate() {
        let src = dataset.features().row(r);
        let dst = out.row_mut(ri);
        for (ci, &c) in cols.iter().enumerate() {
            dst[ci] = src[c];
        }
    }
    out
}

/// Ridge fit on the inner-train rows, R² on the inner-validation rows.
fn ridge_score(dataset: &Dataset, split: &InnerSplit, cols: &[usize]) -> Result<f64> {
    let k = cols.len();
    let x_train = gather_rows(dataset, &split.train_rows, cols);
    let x_val = gather_rows(dataset, &split.val_rows, cols);
    let y_train: Vec<f64> = split
        .train_rows
        .iter()
        .map(|&r| dataset.response()[r])
        .collect();
    let y_val: Vec<f64> = split
        .val_rows
        .iter()
        .map(|&r| dataset.response()[r])
        .collect();

    let n = x_train.rows() as f64;
    let mut col_mean = vec![0.0; k];
    for i in 0..x_train.rows() {
        for (j, m) in col_mean.iter_mut().enumerate() {
            *m += x_train.at(i, j);
        }
    }
    for m in col_mean.iter_mut() {
        *m /= n;
    }
    let y_mean = y_train.iter().sum::<f64>() / n;

    // Normal equations on centered data with Tikhonov damping.
    let mut gram = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for i in 0..x_train.rows() {
        let row = x_train.row(i);
        let yc = y_train[i] - y_mean;
        for a in 0..k {
            let xa = row[a] - col_mean[a];
            xty[a] += xa * yc;
            for b in a..k {
                gram[a][b] += xa * (row[b] - col_mean[b]);
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            gram[a][b] = gram[b][a];
        }
        gram[a][a] += RIDGE_LAMBDA;
    }
    let beta = solve_linear_system(gram, xty)?;

    let preds: Vec<f64> = (0..x_val.rows())
        .map(|i| {
            let row = x_val.row(i);
            y_mean
                + row
                    .iter()
                    .zip(&col_mean)
                    .zip(&beta)
                    .map(|((x, m), b)| (x - m) * b)
                    .sum::<f64>()
        })
        .collect();
    r2(&preds, &y_val)
}

fn mlp_score(dataset: &Dataset, split: &InnerSplit, cols: &[usize], seed: u64) -> Result<f64> {
    let x_train = gather_rows(dataset, &split.train_rows, cols);
    let x_val = gather_rows(dataset, &split.val_rows, cols);
    let y_train: Vec<f64> = split
        .train_rows
        .iter()
        .map(|&r| dataset.response()[r])
        .collect();
    let y_val: Vec<f64> = split
        .val_rows
        .iter()
        .map(|&r| dataset.response()[r])
        .collect();
    let cfg = FitConfig {
        seed,
        ..FitConfig::default()
    };
    let model = fit_regressor(&x_train, &y_train, &cfg)?;
    let preds = predict(&model, &x_val)?;
    r2(&preds, &y_val)
}

/// Greedy forward selection, preserving pick order.
pub fn sfs_select_ordered(
    dataset: &Dataset,
    t: usize,
    inner: InnerModel,
    seed: u64,
) -> Result<SfsSelection> {
    let d = dataset.num_features();
    if t < 1 || t > d {
        return Err(Error::Config(format!(
            "target size {t} out of range 1..={d}"
        )));
    }
    let split = inner_split(dataset.num_samples(), seed)?;
    let mut picked: Vec<usize> = Vec::with_capacity(t); // 0-based columns
    let mut warnings = Vec::new();
    let mut candidate_cols = Vec::with_capacity(t);
    while picked.len() < t {
        let mut best: Option<(usize, f64)> = None;
        for c in 0..d {
            if picked.contains(&c) {
                continue;
            }
            candidate_cols.clear();
            candidate_cols.extend_from_slice(&picked);
            candidate_cols.push(c);
            let score = match inner {
                InnerModel::Ridge => ridge_score(dataset, &split, &candidate_cols),
                InnerModel::Mlp => mlp_score(dataset, &split, &candidate_cols, seed),
            };
            match score {
                Ok(s) if s.is_finite() => {
                    // Strict comparison keeps ties on the lowest index.
                    if best.is_none_or(|(_, bs)| s > bs) {
                        best = Some((c, s));
                    }
                }
                Ok(s) => {
                    warnings.push(format!("feature {} skipped: non-finite score {s}", c + 1));
                }
                Err(e) => {
                    warnings.push(format!("feature {} skipped: {e}", c + 1));
                }
            }
        }
        match best {
            Some((c, _)) => picked.push(c),
            None => {
                return Err(Error::Numeric(
                    "every remaining candidate failed the inner model".into(),
                ))
            }
        }
    }
    Ok(SfsSelection {
        pick_order: picked.iter().map(|&c| c + 1).collect(),
        warnings,
    })
}

/// Greedy forward selection returning sorted positions.
pub fn sfs_select(dataset: &Dataset, t: usize, inner: InnerModel, seed: u64) -> Result<Vec<usize>> {
    let mut selected = sfs_select_ordered(dataset, t, inner, seed)?.pick_order;
    selected.sort_unstable();
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn dataset_from(columns: Vec<Vec<f64>>, response: Vec<f64>) -> Dataset {
        let n = response.len();
        let d = columns.len();
        let mut features = Mat::zeros(n, d);
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                features.set(i, j, v);
            }
        }
        Dataset::new("sfs", features, response).unwrap()
    }

    fn random_columns(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..d)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect()
    }

    #[test]
    fn perfect_predictor_is_picked_first() {
        let columns = random_columns(80, 4, 1);
        let y = columns[2].clone();
        let ds = dataset_from(columns, y);
        let sel = sfs_select_ordered(&ds, 1, InnerModel::Ridge, 3).unwrap();
        assert_eq!(sel.pick_order, vec![3]);
    }

    #[test]
    fn single_pick_matches_exhaustive_argmax() {
        let columns = random_columns(60, 4, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y: Vec<f64> = (0..60)
            .map(|i| 0.8 * columns[1][i] + 0.3 * columns[3][i] + 0.05 * rng.random_range(-1.0..1.0))
            .collect();
        let ds = dataset_from(columns, y);
        let seed = 11;
        let split = inner_split(ds.num_samples(), seed).unwrap();
        let mut best = (0, f64::NEG_INFINITY);
        for c in 0..4 {
            let s = ridge_score(&ds, &split, &[c]).unwrap();
            if s > best.1 {
                best = (c, s);
            }
        }
        let sel = sfs_select_ordered(&ds, 1, InnerModel::Ridge, seed).unwrap();
        assert_eq!(sel.pick_order, vec![best.0 + 1]);
    }

    #[test]
    fn second_pick_matches_exhaustive_step() {
        let columns = random_columns(90, 6, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y: Vec<f64> = (0..90)
            .map(|i| columns[0][i] - 0.7 * columns[4][i] + 0.05 * rng.random_range(-1.0..1.0))
            .collect();
        let ds = dataset_from(columns, y);
        let seed = 2;
        let sel = sfs_select_ordered(&ds, 2, InnerModel::Ridge, seed).unwrap();
        let first = sel.pick_order[0] - 1;
        let split = inner_split(ds.num_samples(), seed).unwrap();
        let mut best = (0, f64::NEG_INFINITY);
        for c in 0..6 {
            if c == first {
                continue;
            }
            let s = ridge_score(&ds, &split, &[first, c]).unwrap();
            if s > best.1 {
                best = (c, s);
            }
        }
        assert_eq!(sel.pick_order[1], best.0 + 1);
    }

    #[test]
    fn full_size_returns_all_features() {
        let columns = random_columns(40, 5, 12);
        let y: Vec<f64> = (0..40).map(|i| columns[0][i]).collect();
        let ds = dataset_from(columns, y);
        let sel = sfs_select(&ds, 5, InnerModel::Ridge, 0).unwrap();
        assert_eq!(sel, vec![1, 2, 3, 4, 5]);
        let ordered = sfs_select_ordered(&ds, 5, InnerModel::Ridge, 0).unwrap();
        assert_eq!(ordered.pick_order.len(), 5);
    }

    #[test]
    fn mlp_inner_model_prefers_the_informative_feature() {
        let columns = random_columns(60, 3, 20);
        let y: Vec<f64> = (0..60).map(|i| columns[1][i]).collect();
        let ds = dataset_from(columns, y);
        let sel = sfs_select(&ds, 1, InnerModel::Mlp, 4).unwrap();
        assert_eq!(sel, vec![2]);
    }

    #[test]
    fn constant_column_does_not_break_selection() {
        let mut columns = random_columns(50, 3, 30);
        columns[0] = vec![0.5; 50];
        let y: Vec<f64> = (0..50).map(|i| columns[2][i]).collect();
        let ds = dataset_from(columns, y);
        let sel = sfs_select(&ds, 2, InnerModel::Ridge, 1).unwrap();
        assert_eq!(sel.len(), 2);
        assert!(sel.contains(&3));
    }
}
