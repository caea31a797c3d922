use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamConfig, AdamState};
use super::network::{CellKind, RecurrentNetwork};
use crate::error::{Error, Result};
use crate::preprocess::WindowedDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    /// Global-norm clip; `None` disables clipping.
    pub grad_clip_norm: Option<f64>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch_size: 32,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps_adam: 1e-8,
            grad_clip_norm: Some(5.0),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.into(),
                message: message.into(),
            })
        };
        if self.epochs == 0 {
            return bad("epochs", "must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate", "must be positive");
        }
        for (key, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(beta > 0.0 && beta < 1.0) {
                return bad(key, "must lie in (0, 1)");
            }
        }
        if !(self.eps_adam > 0.0) {
            return bad("eps_adam", "must be positive");
        }
        if let Some(c) = self.grad_clip_norm {
            if !(c > 0.0) {
                return bad("grad_clip_norm", "must be positive");
            }
        }
        Ok(())
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps_adam,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: RecurrentNetwork,
    /// Sample-weighted mean batch loss of each epoch.
    pub loss_history: Vec<f64>,
    /// Mean squared error of the trained network over the whole dataset.
    pub final_loss: f64,
    pub steps: u64,
}

/// Mini-batch Adam over `data` in chronological order, starting from `net`.
pub fn train(net: RecurrentNetwork, data: &WindowedDataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    net.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("training needs at least one window"));
    }
    let mut net = net;
    let adam = cfg.adam();
    let mut params = net.parameters();
    let mut state = AdamState::new(params.len());
    let mut loss_history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let mut total = 0.0;
        let mut start = 0;
        while start < data.len() {
            let end = (start + cfg.batch_size).min(data.len());
            let grads = match net.batch_gradients(data, start..end, cfg.grad_clip_norm) {
                Ok(g) => g,
                Err(Error::NonFinite(_)) => return Err(Error::Diverged { epoch, loss: f64::NAN }),
                Err(e) => return Err(e),
            };
            total += grads.loss * (end - start) as f64;
            adam_step(&mut state, &mut params, &grads.values, &adam)?;
            net.set_parameters(&params)?;
            start = end;
        }
        let epoch_loss = total / data.len() as f64;
        if !epoch_loss.is_finite() || params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Diverged {
                epoch,
                loss: epoch_loss,
            });
        }
        log::debug!("{} epoch {epoch}: loss {epoch_loss:.6}", net.kind());
        loss_history.push(epoch_loss);
    }
    let preds = net.predict_all(data)?;
    let final_loss = preds
        .iter()
        .zip(&data.targets)
        .map(|(p, y)| (p - y).powi(2))
        .sum::<f64>()
        / data.len() as f64;
    Ok(TrainOutcome {
        network: net,
        loss_history,
        final_loss,
        steps: state.step,
    })
}

/// Seeds a fresh network from `cfg.seed` and trains it.
pub fn fit(kind: CellKind, hidden_size: usize, data: &WindowedDataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    train(RecurrentNetwork::new(kind, hidden_size, cfg.seed)?, data, cfg)
}
