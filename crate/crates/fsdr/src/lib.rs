//! Feature selection for pseudo time-series data by gradient descent over a
//! continuous relaxation of the feature axis.
//!
//! Data whose features are ordered along an axis with sequential correlation
//! (spectral bands, chromatographic channels) lets feature *indices* be
//! treated as continuous quantities: each sample's D discrete values are
//! interpolated into a smooth function on [0, 1] with a natural cubic
//! spline, and `t` learnable index positions are trained jointly with a
//! small regressor by backpropagating the prediction loss through the
//! spline's analytic derivative. Rounding the trained positions back to
//! integers yields the selected feature set. Selection cost scales with `t`,
//! not with the original feature count.
//!
//! The crate also ships the three classic comparison selectors (mutual
//! information, sequential forward selection, LASSO), a synthetic
//! planted-band generator for ground-truth recovery experiments, and a
//! benchmark harness that scores every selector with the same standardized
//! regressor.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release -p fsdr --example generate_data
//! cargo run --release -p fsdr --example spline_relaxation
//! cargo run --release -p fsdr --example train_fsdr
//! cargo run --release -p fsdr --example baseline_selectors
//! cargo run --release -p fsdr --example init_vs_final
//! cargo run --release -p fsdr --example benchmark
//! cargo run --release -p fsdr --example pair_sweep
//! ```
//!
//! The same functionality is scriptable through the `fsdr` binary
//! (`gen | select | bench | sweep`); see the README.
//!
//! # Quick start
//!
//! ```
//! use fsdr::dataset::{generate_synthetic, standardize, SyntheticSpec};
//! use fsdr::fsdr::{train, FsdrConfig};
//!
//! let spec = SyntheticSpec {
//!     n_samples: 80,
//!     n_features: 64,
//!     planted_bands: vec![20, 45],
//!     smoothness: 4.0,
//!     noise_std: 0.02,
//!     seed: 7,
//! };
//! let (dataset, _truth) = generate_synthetic(&spec)?;
//! let (dataset, _params) = standardize(&dataset)?;
//! let config = FsdrConfig { epochs: 30, batch_size: 16, ..Default::default() };
//! let (result, _model) = train(&dataset, 2, &config)?;
//! assert!(result.t_prime <= 2);
//! # Ok::<(), fsdr::Error>(())
//! ```

#![allow(clippy::needless_range_loop)]

pub mod baselines;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod fsdr;
pub mod mat;
pub mod mlp;
pub mod optim;
pub mod spline;

pub use error::{Error, Result};
