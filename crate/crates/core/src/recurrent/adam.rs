use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
}

impl AdamState {
    pub fn new(num_params: usize) -> Self {
        Self {
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            step: 0,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(state: &mut AdamState, params: &mut [f64], grads: &[f64], cfg: &AdamConfig) -> Result<()> {
    if params.len() != grads.len() || state.m.len() != grads.len() {
        return Err(Error::Shape(format!(
            "Adam over {} params with {} grads and {} moments",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("gradient".into()));
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    for k in 0..params.len() {
        let g = grads[k];
        state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * g;
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g * g;
        let m_hat = state.m[k] / c1;
        let v_hat = state.v[k] / c2;
        params[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.eps);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut p = vec![1.0, -2.0, 0.5];
        let mut s = AdamState::new(3);
        for _ in 0..5 {
            adam_step(&mut s, &mut p, &[0.0; 3], &AdamConfig::default()).unwrap();
        }
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
        assert_eq!(s.step, 5);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut p = vec![0.0, 0.0];
        let mut s = AdamState::new(2);
        adam_step(&mut s, &mut p, &[3.0, -0.02], &AdamConfig::default()).unwrap();
        assert!((p[0] + 1e-3).abs() < 1e-10);
        assert!((p[1] - 1e-3).abs() < 1e-9);
    }

    #[test]
    fn descends_a_quadratic() {
        let cfg = AdamConfig {
            learning_rate: 0.1,
            ..AdamConfig::default()
        };
        let mut w = [1.0];
        let mut s = AdamState::new(1);
        for _ in 0..100 {
            let g = [2.0 * w[0]];
            adam_step(&mut s, &mut w, &g, &cfg).unwrap();
        }
        // Independent float64 evaluation of the same 100 updates.
        assert!((w[0] - 0.002936675681102549).abs() < 1e-12);
        assert!(w[0].abs() < 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        let mut s = AdamState::new(1);
        let cfg = AdamConfig::default();
        assert!(matches!(
            adam_step(&mut s, &mut [0.0], &[f64::NAN], &cfg),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            adam_step(&mut s, &mut [0.0, 1.0], &[0.0, 1.0], &cfg),
            Err(Error::Shape(_))
        ));
        assert_eq!(s.step, 0);
    }
}
