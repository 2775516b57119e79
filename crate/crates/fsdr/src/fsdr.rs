//! Gradient-based selection of feature indices over spline-relaxed data.
//!
//! Each of the `t` target indices is a raw learnable scalar. A sigmoid maps
//! it into (0, 1), which is simultaneously the spline-domain coordinate and
//! (after rescaling by D-1) the feature position. Every minibatch evaluates
//! the per-sample splines at the current positions, feeds the values through
//! the regressor, and backpropagates the loss both into the network weights
//! and — via the analytic spline derivatives — into the raw index values.
//! After training the positions are rounded back to integers and deduplicated.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::mlp::{init_model, mse_loss, Gradients, MlpModel, HIDDEN_DIMS};
use crate::optim::{AdamParams, AdamState, ModelOptimizer};
use crate::spline::{relax_dataset, ContinuousDataset};

/// Raw learnable index values with their sigmoid mapping to (0, 1).
#[derive(Debug, Clone)]
pub struct IndexParams {
    raw: Vec<f64>,
    d: usize,
}

impl IndexParams {
    pub fn target_size(&self) -> usize {
        self.raw.len()
    }

    pub fn num_features(&self) -> usize {
        self.d
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn raw_mut(&mut self) -> &mut [f64] {
        &mut self.raw
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Initialize `t` indices evenly spaced strictly inside (1, D): position k is
/// `1 + k (D-1)/(t+1)`, so the sigmoid pre-images stay finite.
pub fn init_indices(t: usize, d: usize) -> Result<IndexParams> {
    if t < 1 {
        return Err(Error::Config("target size must be >= 1".into()));
    }
    if d < 2 {
        return Err(Error::Config("need at least 2 features".into()));
    }
    if t > d {
        return Err(Error::Config(format!(
            "target size {t} exceeds feature count {d}"
        )));
    }
    let raw = (1..=t).map(|k| logit(k as f64 / (t + 1) as f64)).collect();
    Ok(IndexParams { raw, d })
}

/// Sigmoid image of the raw values: spline-domain coordinates in (0, 1).
/// 0 corresponds to feature 1 and 1 to feature D.
pub fn map_to_s(params: &IndexParams) -> Vec<f64> {
    params.raw.iter().map(|&r| sigmoid(r)).collect()
}

/// Round positions back to integer features: `round(1 + s (D-1))`, sorted
/// and deduplicated, so the result size may be smaller than `t`.
pub fn extract_final(params: &IndexParams) -> Vec<usize> {
    let d = params.d;
    let mut out: Vec<usize> = map_to_s(params)
        .iter()
        .map(|&s| (1.0 + s * (d - 1) as f64).round() as usize)
        .map(|i| i.clamp(1, d))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Evaluate every sample's spline (value and derivative) at the current
/// positions for the given batch rows.
pub fn gather(continuous: &ContinuousDataset, s: &[f64], batch: &[usize]) -> Result<(Mat, Mat)> {
    for &i in batch {
        if i >= continuous.num_samples() {
            return Err(Error::Shape(format!(
                "batch row {i} out of range for {} samples",
                continuous.num_samples()
            )));
        }
    }
    let mut inputs = Mat::zeros(batch.len(), s.len());
    let mut derivs = Mat::zeros(batch.len(), s.len());
    for (bi, &i) in batch.iter().enumerate() {
        let spline = continuous.spline(i);
        let in_row = inputs.row_mut(bi);
        for (k, &sk) in s.iter().enumerate() {
            in_row[k] = spline.eval(sk);
        }
        let d_row = derivs.row_mut(bi);
        for (k, &sk) in s.iter().enumerate() {
            d_row[k] = spline.eval_deriv(sk);
        }
    }
    Ok((inputs, derivs))
}

/// Loss and gradients of one minibatch through the whole pipeline.
#[derive(Debug)]
pub struct PipelineGradients {
    pub loss: f64,
    /// Gradient of the batch loss with respect to each raw index value.
    pub raw: Vec<f64>,
    /// Gradients for the network parameters.
    pub network: Gradients,
}

/// Run gather -> forward -> MSE -> backward for one batch and chain the
/// input gradients through the spline derivatives and the sigmoid down to
/// the raw index values.
pub fn pipeline_gradients(
    continuous: &ContinuousDataset,
    model: &MlpModel,
    params: &IndexParams,
    batch: &[usize],
    targets: &[f64],
) -> Result<PipelineGradients> {
    if batch.is_empty() {
        return Err(Error::Config("empty batch".into()));
    }
    let s = map_to_s(params);
    let (inputs, derivs) = gather(continuous, &s, batch)?;
    let (preds, cache) = model.forward(&inputs)?;
    let batch_targets: Vec<f64> = batch.iter().map(|&i| targets[i]).collect();
    let (loss, dpred) = mse_loss(&preds, &batch_targets)?;
    let (network, input_grads) = model.backward(&cache, &dpred)?;
    let mut raw = vec![0.0; params.target_size()];
    for (k, r) in raw.iter_mut().enumerate() {
        let mut ds = 0.0;
        for bi in 0..batch.len() {
            ds += input_grads.at(bi, k) * derivs.at(bi, k);
        }
        // d s / d raw for the sigmoid.
        *r = ds * s[k] * (1.0 - s[k]);
    }
    Ok(PipelineGradients { loss, raw, network })
}

/// Training configuration. Defaults: 200 epochs, batch 64, Adam 1e-3 for the
/// network and 2e-3 for the index parameters.
///
/// The index rate is deliberately larger than the network rate (the two
/// parameter groups live on very different scales) but only mildly so:
/// early in training, before the network has learned anything, index
/// gradients are close to noise, and a large rate lets positions random-walk
/// out of their basins and strand on plateaus of the loss surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FsdrConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub network_lr: f64,
    pub index_lr: f64,
    pub seed: u64,
}

impl Default for FsdrConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 64,
            network_lr: 1e-3,
            index_lr: 1e-3,
            seed: 0,
        }
    }
}

/// Outcome of a selector run. Serialized as
/// `{"selected", "t_prime", "initial", "wall_time_s", "loss_trace"}`;
/// fields that do not apply to a selector are null.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Final feature positions, 1-based, sorted, duplicate-free.
    pub selected: Vec<usize>,
    pub t_prime: usize,
    /// Rounded starting positions (index-learning selectors only).
    pub initial: Option<Vec<usize>>,
    pub wall_time_s: f64,
    /// Per-epoch training MSE (index-learning selectors only).
    pub loss_trace: Option<Vec<f64>>,
    /// Per-epoch snapshots of the continuous positions; not serialized.
    #[serde(skip)]
    pub s_trace: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl SelectionResult {
    /// Result shape used by selectors without an index-training trace.
    pub fn from_indices(selected: Vec<usize>, wall_time_s: f64, warnings: Vec<String>) -> Self {
        let t_prime = selected.len();
        Self {
            selected,
            t_prime,
            initial: None,
            wall_time_s,
            loss_trace: None,
            s_trace: Vec::new(),
            warnings,
        }
    }
}

/// Train index parameters and network jointly on a standardized dataset.
///
/// Wall time covers spline construction and the whole training loop but not
/// dataset preparation. Aborts with a diagnostic if the loss or any
/// parameter turns non-finite.
pub fn train(
    dataset: &Dataset,
    t: usize,
    config: &FsdrConfig,
) -> Result<(SelectionResult, MlpModel)> {
    let n = dataset.num_samples();
    let d = dataset.num_features();
    if config.batch_size < 1 || config.batch_size > n {
        return Err(Error::Config(format!(
            "batch_size {} must be in 1..={n}",
            config.batch_size
        )));
    }
    if !(config.network_lr.is_finite() && config.index_lr.is_finite())
        || config.network_lr < 0.0
        || config.index_lr < 0.0
    {
        return Err(Error::Config("learning rates must be non-negative".into()));
    }

    let started = Instant::now();
    let continuous = relax_dataset(dataset)?;
    let mut params = init_indices(t, d)?;
    let initial = extract_final(&params);

    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let model_seed: u64 = master.random();
    let mut dims = vec![t];
    dims.extend_from_slice(&HIDDEN_DIMS);
    dims.push(1);
    let mut model = init_model(&dims, model_seed)?;
    let mut net_opt = ModelOptimizer::new(&model, AdamParams::with_lr(config.network_lr));
    let mut idx_opt = AdamState::new(t, AdamParams::with_lr(config.index_lr));

    let targets = dataset.response();
    let mut order: Vec<usize> = (0..n).collect();
    let mut loss_trace = Vec::with_capacity(config.epochs);
    let mut s_trace = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut master);
        let mut sse = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let step = pipeline_gradients(&continuous, &model, &params, chunk, targets)?;
            if !step.loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite loss at epoch {epoch}; last finite epoch loss: {:?}",
                    loss_trace.last()
                )));
            }
            net_opt.step(&mut model, &step.network).map_err(|e| {
                Error::Numeric(format!("network update failed at epoch {epoch}: {e}"))
            })?;
            idx_opt.step(params.raw_mut(), &step.raw).map_err(|e| {
                Error::Numeric(format!("index update failed at epoch {epoch}: {e}"))
            })?;
            sse += step.loss * chunk.len() as f64;
        }
        if !model.all_finite() {
            return Err(Error::Numeric(format!(
                "non-finite model parameter after epoch {epoch}"
            )));
        }
        loss_trace.push(sse / n as f64);
        s_trace.push(map_to_s(&params));
    }

    let selected = extract_final(&params);
    let mut warnings = Vec::new();
    if selected.len() < t {
        warnings.push(format!(
            "index collapse: requested {t} features, {} distinct after rounding",
            selected.len()
        ));
    }
    let result = SelectionResult {
        t_prime: selected.len(),
        selected,
        initial: Some(initial),
        wall_time_s: started.elapsed().as_secs_f64(),
        loss_trace: Some(loss_trace),
        s_trace,
        warnings,
    };
    Ok((result, model))
}
