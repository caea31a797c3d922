//! GRU cell with the reset gate applied to the recurrent candidate term.
//!
//! ```text
//! z = σ(W_xz x + W_hz h + b_z)
//! r = σ(W_xr x + W_hr h + b_r)
//! n = tanh(W_xn x + r ⊙ (W_hn h) + b_n)
//! h' = (1 − z) ⊙ h + z ⊙ n
//! ```
//!
//! Gate blocks are stacked in the order z, r, n.

use serde::{Deserialize, Serialize};

use super::linalg::{matvec_acc, matvec_t_acc, sigmoid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GruGate {
    Update,
    Reset,
    Candidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GruParams {
    pub hidden_size: usize,
    pub input_size: usize,
    pub w_x: Vec<f64>,
    pub w_h: Vec<f64>,
    pub b: Vec<f64>,
}

impl GruParams {
    pub const GATES: usize = 3;

    pub fn zeros(hidden_size: usize, input_size: usize) -> Self {
        let rows = Self::GATES * hidden_size;
        Self {
            hidden_size,
            input_size,
            w_x: vec![0.0; rows * input_size],
            w_h: vec![0.0; rows * hidden_size],
            b: vec![0.0; rows],
        }
    }

    pub fn input_weights(&self, gate: GruGate) -> &[f64] {
        let n = self.hidden_size * self.input_size;
        &self.w_x[gate as usize * n..(gate as usize + 1) * n]
    }

    pub fn recurrent_weights(&self, gate: GruGate) -> &[f64] {
        let n = self.hidden_size * self.hidden_size;
        &self.w_h[gate as usize * n..(gate as usize + 1) * n]
    }

    pub fn bias(&self, gate: GruGate) -> &[f64] {
        let h = self.hidden_size;
        &self.b[gate as usize * h..(gate as usize + 1) * h]
    }

    pub fn validate(&self) -> Result<()> {
        let (h, i) = (self.hidden_size, self.input_size);
        if h == 0 || i == 0 {
            return Err(Error::Shape("GRU sizes must be positive".into()));
        }
        if self.w_x.len() != 3 * h * i || self.w_h.len() != 3 * h * h || self.b.len() != 3 * h {
            return Err(Error::Shape(format!("GRU parameter buffers do not match H={h}, I={i}")));
        }
        if self.w_x.iter().chain(&self.w_h).chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("GRU parameters".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GruGates {
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub n: Vec<f64>,
    /// `W_hn h`, before the reset gate is applied.
    pub(crate) u_n: Vec<f64>,
}

/// One GRU step. Returns the new hidden state and the gate activations.
pub fn gru_cell(params: &GruParams, x: &[f64], h_prev: &[f64]) -> Result<(Vec<f64>, GruGates)> {
    params.validate()?;
    let h = params.hidden_size;
    if x.len() != params.input_size || h_prev.len() != h {
        return Err(Error::Shape(format!(
            "GRU step expects x[{}], h[{h}]; got x[{}], h[{}]",
            params.input_size,
            x.len(),
            h_prev.len()
        )));
    }
    if x.iter().chain(h_prev).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("GRU step input".into()));
    }
    Ok(step(params, x, h_prev))
}

pub(crate) fn step(params: &GruParams, x: &[f64], h_prev: &[f64]) -> (Vec<f64>, GruGates) {
    let h = params.hidden_size;
    let mut ax = params.b.clone();
    matvec_acc(&mut ax, &params.w_x, x);
    let mut uh = vec![0.0; 3 * h];
    matvec_acc(&mut uh, &params.w_h, h_prev);

    let z: Vec<f64> = (0..h).map(|k| sigmoid(ax[k] + uh[k])).collect();
    let r: Vec<f64> = (0..h).map(|k| sigmoid(ax[h + k] + uh[h + k])).collect();
    let u_n = uh[2 * h..].to_vec();
    let n: Vec<f64> = (0..h).map(|k| (ax[2 * h + k] + r[k] * u_n[k]).tanh()).collect();
    let h_new = (0..h).map(|k| (1.0 - z[k]) * h_prev[k] + z[k] * n[k]).collect();
    (h_new, GruGates { z, r, n, u_n })
}

/// Reverse pass through one step. Writes the gradients of the input-side
/// pre-activations into `dx_pre` and of the recurrent products into
/// `dh_pre` (both `3H`), and returns dL/dh.
pub(crate) fn step_backward(
    params: &GruParams,
    h_prev: &[f64],
    gates: &GruGates,
    dh: &[f64],
    dx_pre: &mut [f64],
    dh_pre: &mut [f64],
) -> Vec<f64> {
    let h = params.hidden_size;
    let GruGates { z, r, n, u_n } = gates;
    let mut dh_prev = vec![0.0; h];
    for k in 0..h {
        let dz = dh[k] * (n[k] - h_prev[k]);
        let dn = dh[k] * z[k];
        dh_prev[k] = dh[k] * (1.0 - z[k]);
        let da_n = dn * (1.0 - n[k] * n[k]);
        let da_z = dz * z[k] * (1.0 - z[k]);
        let da_r = da_n * u_n[k] * r[k] * (1.0 - r[k]);
        dx_pre[k] = da_z;
        dx_pre[h + k] = da_r;
        dx_pre[2 * h + k] = da_n;
        dh_pre[k] = da_z;
        dh_pre[h + k] = da_r;
        dh_pre[2 * h + k] = da_n * r[k];
    }
    matvec_t_acc(&mut dh_prev, &params.w_h, dh_pre);
    dh_prev
}
