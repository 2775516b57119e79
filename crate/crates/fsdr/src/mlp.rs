//! Small fully connected regressor with explicit forward and backward passes.
//!
//! The architecture family is fixed: dense layers with tanh hidden
//! activations and a linear scalar output head. Gradients are hand-derived
//! and returned for every parameter **and** for the input matrix — the input
//! gradient is the channel through which feature-index parameters learn.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::optim::{AdamParams, ModelOptimizer};

/// Hidden layer sizes of the standardized regressor used everywhere in this
/// crate (index training, selection evaluation, inner wrapper models).
pub const HIDDEN_DIMS: [usize; 2] = [15, 10];

/// Dense feed-forward regressor. Weight `l` has shape
/// `(layer_dims[l], layer_dims[l+1])` (inputs x outputs, row-major).
#[derive(Debug, Clone)]
pub struct MlpModel {
    layer_dims: Vec<usize>,
    weights: Vec<Mat>,
    biases: Vec<Vec<f64>>,
}

/// Per-layer post-activation outputs for one batch, kept for the backward
/// pass. The final entry holds the (linear) output column.
#[derive(Debug)]
pub struct ForwardCache {
    inputs: Mat,
    activations: Vec<Mat>,
}

/// Parameter gradients with the same shapes as the model tensors.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Mat>,
    pub biases: Vec<Vec<f64>>,
}

/// Xavier-uniform initialized model with zero biases, deterministic under
/// `seed`. Requires at least two dims and a scalar output.
pub fn init_model(layer_dims: &[usize], seed: u64) -> Result<MlpModel> {
    if layer_dims.len() < 2 {
        return Err(Error::Config(format!(
            "need at least input and output dims, got {layer_dims:?}"
        )));
    }
    if *layer_dims.last().unwrap() != 1 {
        return Err(Error::Config(format!(
            "output dim must be 1, got {layer_dims:?}"
        )));
    }
    if layer_dims.contains(&0) {
        return Err(Error::Config(format!("zero-sized layer in {layer_dims:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for w in layer_dims.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let mut m = Mat::zeros(fan_in, fan_out);
        for v in m.as_mut_slice() {
            *v = rng.random_range(-bound..bound);
        }
        weights.push(m);
        biases.push(vec![0.0; fan_out]);
    }
    Ok(MlpModel {
        layer_dims: layer_dims.to_vec(),
        weights,
        biases,
    })
}

impl MlpModel {
    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    fn num_layers(&self) -> usize {
        self.weights.len()
    }

    /// Mutable views of every parameter tensor, weights and biases
    /// interleaved per layer (the optimizer walks these in order).
    pub fn params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(self.num_layers() * 2);
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            out.push(w.as_mut_slice());
            out.push(b.as_mut_slice());
        }
        out
    }

    /// Flat parameter views in the same order as [`MlpModel::params_mut`].
    pub fn params(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(self.num_layers() * 2);
        for (w, b) in self.weights.iter().zip(self.biases.iter()) {
            out.push(w.as_slice());
            out.push(b.as_slice());
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.params()
            .iter()
            .all(|p| p.iter().all(|v| v.is_finite()))
    }

    /// Batched forward pass: tanh hidden layers, linear output.
    pub fn forward(&self, inputs: &Mat) -> Result<(Vec<f64>, ForwardCache)> {
        if inputs.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input width {} != model input dim {}",
                inputs.cols(),
                self.input_dim()
            )));
        }
        let batch = inputs.rows();
        let mut activations = Vec::with_capacity(self.num_layers());
        let mut current = inputs.clone();
        for l in 0..self.num_layers() {
            let w = &self.weights[l];
            let b = &self.biases[l];
            let last = l + 1 == self.num_layers();
            let mut next = Mat::zeros(batch, w.cols());
            for i in 0..batch {
                let row = current.row(i);
                let out = next.row_mut(i);
                for (o, out_v) in out.iter_mut().enumerate() {
                    let mut z = b[o];
                    for (a, &x) in row.iter().enumerate() {
                        z += x * w.at(a, o);
                    }
                    *out_v = if last { z } else { z.tanh() };
                }
            }
            activations.push(next.clone());
            current = next;
        }
        let predictions = (0..batch).map(|i| current.at(i, 0)).collect();
        Ok((
            predictions,
            ForwardCache {
                inputs: inputs.clone(),
                activations,
            },
        ))
    }

    /// Reverse-mode gradients for all parameters and for the inputs.
    pub fn backward(&self, cache: &ForwardCache, dloss_dpred: &[f64]) -> Result<(Gradients, Mat)> {
        let batch = cache.inputs.rows();
        if dloss_dpred.len() != batch {
            return Err(Error::Shape(format!(
                "loss gradient length {} != batch size {batch}",
                dloss_dpred.len()
            )));
        }
        if cache.activations.len() != self.num_layers() || cache.inputs.cols() != self.input_dim() {
            return Err(Error::Shape("cache does not match model".into()));
        }

        let mut d_weights: Vec<Mat> = self
            .weights
            .iter()
            .map(|w| Mat::zeros(w.rows(), w.cols()))
            .collect();
        let mut d_biases: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();

        // Output layer is linear, so its delta is the loss gradient itself.
        let mut delta = Mat::zeros(batch, 1);
        for i in 0..batch {
            delta.set(i, 0, dloss_dpred[i]);
        }

        let mut input_grads = Mat::zeros(batch, self.input_dim());
        for l in (0..self.num_layers()).rev() {
            let layer_inputs: &Mat = if l == 0 {
                &cache.inputs
            } else {
                &cache.activations[l - 1]
            };
            let dw = &mut d_weights[l];
            for i in 0..batch {
                let x = layer_inputs.row(i);
                let dz = delta.row(i);
                for (a, &xa) in x.iter().enumerate() {
                    let wrow = dw.row_mut(a);
                    for (o, &dzo) in dz.iter().enumerate() {
                        wrow[o] += xa * dzo;
                    }
                }
                for (o, &dzo) in dz.iter().enumerate() {
                    d_biases[l][o] += dzo;
                }
            }
            // Propagate to the layer below (through tanh) or to the inputs.
            let w = &self.weights[l];
            let mut below = Mat::zeros(batch, w.rows());
            for i in 0..batch {
                let dz = delta.row(i);
                let out = below.row_mut(i);
                for (a, out_v) in out.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for (o, &dzo) in dz.iter().enumerate() {
                        s += dzo * w.at(a, o);
                    }
                    *out_v = s;
                }
            }
            if l == 0 {
                input_grads = below;
            } else {
                let act = &cache.activations[l - 1];
                for i in 0..batch {
                    let out = below.row_mut(i);
                    for (a, out_v) in out.iter_mut().enumerate() {
                        let t = act.at(i, a);
                        *out_v *= 1.0 - t * t;
                    }
                }
                delta = below;
            }
        }
        Ok((
            Gradients {
                weights: d_weights,
                biases: d_biases,
            },
            input_grads,
        ))
    }
}

/// Mean squared error and its gradient with respect to the predictions.
pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
    if predictions.len() != targets.len() || predictions.is_empty() {
        return Err(Error::Shape(format!(
            "predictions ({}) and targets ({}) must be equal-length and non-empty",
            predictions.len(),
            targets.len()
        )));
    }
    let b = predictions.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(predictions.len());
    for (&p, &t) in predictions.iter().zip(targets) {
        let e = p - t;
        loss += e * e;
        grad.push(2.0 * e / b);
    }
    Ok((loss / b, grad))
}

/// Budget for fitting the standardized regressor on a fixed feature matrix.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            batch_size: 64,
            learning_rate: 1e-3,
            seed: 0,
        }
    }
}

/// Train a fresh `[k, 15, 10, 1]` regressor on `features` with mini-batch
/// Adam. The batch size is clamped to the sample count. Deterministic under
/// `cfg.seed`; aborts with a diagnostic on non-finite loss or parameters.
pub fn fit_regressor(features: &Mat, targets: &[f64], cfg: &FitConfig) -> Result<MlpModel> {
    if features.rows() != targets.len() || features.rows() == 0 {
        return Err(Error::Shape(format!(
            "{} feature rows vs {} targets",
            features.rows(),
            targets.len()
        )));
    }
    let n = features.rows();
    let batch_size = cfg.batch_size.clamp(1, n);
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let model_seed: u64 = master.random();
    let mut dims = vec![features.cols()];
    dims.extend_from_slice(&HIDDEN_DIMS);
    dims.push(1);
    let mut model = init_model(&dims, model_seed)?;
    let mut opt = ModelOptimizer::new(&model, AdamParams::with_lr(cfg.learning_rate));
    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut master);
        for chunk in order.chunks(batch_size) {
            let mut batch = Mat::zeros(chunk.len(), features.cols());
            let mut batch_targets = Vec::with_capacity(chunk.len());
            for (bi, &i) in chunk.iter().enumerate() {
                batch.row_mut(bi).copy_from_slice(features.row(i));
                batch_targets.push(targets[i]);
            }
            let (preds, cache) = model.forward(&batch)?;
            let (loss, dpred) = mse_loss(&preds, &batch_targets)?;
            if !loss.is_finite() {
                return Err(Error::Numeric(format!("non-finite loss at epoch {epoch}")));
            }
            let (grads, _) = model.backward(&cache, &dpred)?;
            opt.step(&mut model, &grads)
                .map_err(|e| Error::Numeric(format!("update failed at epoch {epoch}: {e}")))?;
        }
        if !model.all_finite() {
            return Err(Error::Numeric(format!(
                "non-finite model parameter after epoch {epoch}"
            )));
        }
    }
    Ok(model)
}

/// Predict a full feature matrix with a trained model.
pub fn predict(model: &MlpModel, features: &Mat) -> Result<Vec<f64>> {
    Ok(model.forward(features)?.0)
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    layer_dims: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

/// Serialize a model as JSON (layer dims plus flat row-major parameters).
pub fn save_checkpoint(model: &MlpModel, path: impl AsRef<Path>) -> Result<()> {
    let ck = Checkpoint {
        layer_dims: model.layer_dims.clone(),
        weights: model
            .weights
            .iter()
            .map(|w| w.as_slice().to_vec())
            .collect(),
        biases: model.biases.clone(),
    };
    std::fs::write(path.as_ref(), serde_json::to_string_pretty(&ck)?)?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<MlpModel> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let ck: Checkpoint = serde_json::from_str(&text)?;
    if ck.layer_dims.len() < 2 || ck.weights.len() != ck.layer_dims.len() - 1 {
        return Err(Error::Data("malformed checkpoint".into()));
    }
    let mut weights = Vec::new();
    for (w, dims) in ck.weights.into_iter().zip(ck.layer_dims.windows(2)) {
        weights.push(Mat::from_flat(dims[0], dims[1], w)?);
    }
    for (b, dims) in ck.biases.iter().zip(ck.layer_dims.windows(2)) {
        if b.len() != dims[1] {
            return Err(Error::Data("malformed checkpoint biases".into()));
        }
    }
    Ok(MlpModel {
        layer_dims: ck.layer_dims,
        weights,
        biases: ck.biases,
    })
}
