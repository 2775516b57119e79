//! The three comparison selectors — mutual information (filter), sequential
//! forward selection (wrapper), LASSO (embedded) — behind one dispatch enum
//! that also covers the gradient-based selector.
//!
//! Every selector consumes a standardized dataset, returns sorted,
//! duplicate-free, 1-based feature positions, and is a pure function of
//! `(dataset, options, seed)`.

pub mod lasso;
pub mod mi;
pub mod sfs;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fsdr::{train, FsdrConfig, SelectionResult};

pub use lasso::{coordinate_descent, default_lambda_path, lasso_select, CdFit, LassoSelection};
pub use mi::{mi_scores, mi_select};
pub use sfs::{sfs_select, sfs_select_ordered, InnerModel, SfsSelection};

/// Which selector to run, with its method-specific options. The requested
/// target size and seed are supplied at invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum SelectorSpec {
    Fsdr {
        epochs: usize,
        batch_size: usize,
        network_lr: f64,
        index_lr: f64,
    },
    Mi {
        bins: usize,
    },
    Sfs {
        inner: InnerModel,
    },
    Lasso {
        path_len: usize,
        path_ratio: f64,
    },
}

impl SelectorSpec {
    pub fn fsdr_default() -> Self {
        let c = FsdrConfig::default();
        SelectorSpec::Fsdr {
            epochs: c.epochs,
            batch_size: c.batch_size,
            network_lr: c.network_lr,
            index_lr: c.index_lr,
        }
    }

    pub fn mi_default() -> Self {
        SelectorSpec::Mi { bins: 16 }
    }

    pub fn sfs_default() -> Self {
        SelectorSpec::Sfs {
            inner: InnerModel::Ridge,
        }
    }

    pub fn lasso_default() -> Self {
        SelectorSpec::Lasso {
            path_len: 50,
            path_ratio: 1e-3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SelectorSpec::Fsdr { .. } => "fsdr",
            SelectorSpec::Mi { .. } => "mi",
            SelectorSpec::Sfs { .. } => "sfs",
            SelectorSpec::Lasso { .. } => "lasso",
        }
    }

    /// Parse a selector name into its default-configured spec.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "fsdr" => Ok(Self::fsdr_default()),
            "mi" => Ok(Self::mi_default()),
            "sfs" => Ok(Self::sfs_default()),
            "lasso" => Ok(Self::lasso_default()),
            other => Err(Error::Config(format!(
                "unknown method \"{other}\" (expected fsdr, mi, sfs, or lasso)"
            ))),
        }
    }

    /// Run the selector on a standardized dataset. The reported wall time
    /// covers only the selector itself.
    pub fn select(&self, dataset: &Dataset, t: usize, seed: u64) -> Result<SelectionResult> {
        if t < 1 || t > dataset.num_features() {
            return Err(Error::Config(format!(
                "target size {t} out of range 1..={}",
                dataset.num_features()
            )));
        }
        match self {
            SelectorSpec::Fsdr {
                epochs,
                batch_size,
                network_lr,
                index_lr,
            } => {
                let config = FsdrConfig {
                    epochs: *epochs,
                    batch_size: (*batch_size).min(dataset.num_samples()),
                    network_lr: *network_lr,
                    index_lr: *index_lr,
                    seed,
                };
                let (result, _) = train(dataset, t, &config)?;
                Ok(result)
            }
            SelectorSpec::Mi { bins } => {
                let started = Instant::now();
                let selected = mi_select(dataset, t, *bins)?;
                Ok(SelectionResult::from_indices(
                    selected,
                    started.elapsed().as_secs_f64(),
                    Vec::new(),
                ))
            }
            SelectorSpec::Sfs { inner } => {
                let started = Instant::now();
                let outcome = sfs_select_ordered(dataset, t, *inner, seed)?;
                let mut selected = outcome.pick_order.clone();
                selected.sort_unstable();
                Ok(SelectionResult::from_indices(
                    selected,
                    started.elapsed().as_secs_f64(),
                    outcome.warnings,
                ))
            }
            SelectorSpec::Lasso {
                path_len,
                path_ratio,
            } => {
                let started = Instant::now();
                let path = default_lambda_path(dataset, *path_len, *path_ratio)?;
                let outcome = lasso_select(dataset, t, &path)?;
                Ok(SelectionResult::from_indices(
                    outcome.selected,
                    started.elapsed().as_secs_f64(),
                    outcome.warnings,
                ))
            }
        }
    }
}

/// Solve a small dense linear system by Gaussian elimination with partial
/// pivoting. Used for the ridge inner model.
pub(crate) fn solve_linear_system(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .ok_or_else(|| Error::Numeric("empty system".into()))?;
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::Numeric("singular system".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, standardize, SyntheticSpec};
    use proptest::prelude::*;

    fn planted(seed: u64) -> Dataset {
        let spec = SyntheticSpec {
            n_samples: 120,
            n_features: 24,
            planted_bands: vec![6, 18],
            smoothness: 2.0,
            noise_std: 0.02,
            seed,
        };
        let (ds, _) = generate_synthetic(&spec).unwrap();
        standardize(&ds).unwrap().0
    }

    #[test]
    fn dispatch_names_round_trip() {
        for name in ["fsdr", "mi", "sfs", "lasso"] {
            assert_eq!(SelectorSpec::from_name(name).unwrap().name(), name);
        }
        assert!(SelectorSpec::from_name("ridge").is_err());
    }

    #[test]
    fn selectors_share_the_output_contract() {
        let ds = planted(11);
        let specs = [
            SelectorSpec::Fsdr {
                epochs: 10,
                batch_size: 32,
                network_lr: 1e-3,
                index_lr: 1e-2,
            },
            SelectorSpec::mi_default(),
            SelectorSpec::sfs_default(),
            SelectorSpec::lasso_default(),
        ];
        for spec in &specs {
            let r = spec.select(&ds, 4, 1).unwrap();
            assert!(r.t_prime <= 4, "{}: t'={}", spec.name(), r.t_prime);
            assert_eq!(r.selected.len(), r.t_prime);
            let mut sorted = r.selected.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(
                sorted,
                r.selected,
                "{} output not sorted/deduped",
                spec.name()
            );
            assert!(r
                .selected
                .iter()
                .all(|&i| (1..=ds.num_features()).contains(&i)));
        }
    }

    #[test]
    fn selectors_are_deterministic() {
        let ds = planted(4);
        for spec in [
            SelectorSpec::mi_default(),
            SelectorSpec::sfs_default(),
            SelectorSpec::lasso_default(),
        ] {
            let a = spec.select(&ds, 3, 7).unwrap();
            let b = spec.select(&ds, 3, 7).unwrap();
            assert_eq!(a.selected, b.selected, "{}", spec.name());
        }
    }

    #[test]
    fn rejects_out_of_range_target() {
        let ds = planted(2);
        assert!(SelectorSpec::mi_default().select(&ds, 0, 1).is_err());
        assert!(SelectorSpec::mi_default()
            .select(&ds, ds.num_features() + 1, 1)
            .is_err());
    }

    #[test]
    fn linear_solver_matches_known_solution() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_linear_system(a, vec![5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn mi_selection_size_is_exact(t in 1usize..8) {
            let ds = planted(13);
            let r = SelectorSpec::mi_default().select(&ds, t, 0).unwrap();
            prop_assert_eq!(r.selected.len(), t);
        }
    }
}
