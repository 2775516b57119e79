//! Adam optimizer with bias correction.

use crate::error::{Error, Result};
use crate::mlp::{Gradients, MlpModel};

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamParams {
    pub fn with_lr(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            ..Self::default()
        }
    }
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators for one flat parameter tensor.
#[derive(Debug, Clone)]
pub struct AdamState {
    hyper: AdamParams,
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl AdamState {
    pub fn new(len: usize, hyper: AdamParams) -> Self {
        Self {
            hyper,
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One Adam update in place. A non-finite gradient is reported as an
    /// error and the step is skipped (state and parameters untouched).
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "adam state holds {} values, got {} params / {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(k) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite gradient at component {k}; step skipped"
            )));
        }
        self.step += 1;
        let t = self.step as i32;
        let AdamParams {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.hyper;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for ((p, &g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
        Ok(())
    }
}

/// Adam over every tensor of an [`MlpModel`], weights and biases interleaved
/// in the order exposed by [`MlpModel::params_mut`].
#[derive(Debug, Clone)]
pub struct ModelOptimizer {
    states: Vec<AdamState>,
}

impl ModelOptimizer {
    pub fn new(model: &MlpModel, hyper: AdamParams) -> Self {
        let states = model
            .params()
            .iter()
            .map(|p| AdamState::new(p.len(), hyper))
            .collect();
        Self { states }
    }

    pub fn step(&mut self, model: &mut MlpModel, grads: &Gradients) -> Result<()> {
        let mut flat_grads: Vec<&[f64]> = Vec::with_capacity(self.states.len());
        for (w, b) in grads.weights.iter().zip(grads.biases.iter()) {
            flat_grads.push(w.as_slice());
            flat_grads.push(b.as_slice());
        }
        let params = model.params_mut();
        if params.len() != self.states.len() || flat_grads.len() != self.states.len() {
            return Err(Error::Shape("optimizer/model tensor count mismatch".into()));
        }
        // Validate everything first so a failure leaves no tensor half-updated.
        for (g, s) in flat_grads.iter().zip(&self.states) {
            if g.len() != s.m.len() {
                return Err(Error::Shape("gradient tensor shape mismatch".into()));
            }
            if let Some(k) = g.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite gradient at component {k}; step skipped"
                )));
            }
        }
        for ((p, g), s) in params.into_iter().zip(flat_grads).zip(&mut self.states) {
            s.step(p, g)?;
        }
        Ok(())
    }
}
