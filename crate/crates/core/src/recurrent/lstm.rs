//! Standard (non-peephole) LSTM cell.
//!
//! ```text
//! i = σ(W_xi x + W_hi h + b_i)     f = σ(W_xf x + W_hf h + b_f)
//! g = tanh(W_xg x + W_hg h + b_g)  o = σ(W_xo x + W_ho h + b_o)
//! c' = f ⊙ c + i ⊙ g               h' = o ⊙ tanh(c')
//! ```
//!
//! The four gates are stacked row-wise in the order i, f, g, o, so `w_x` is
//! `4H × I`, `w_h` is `4H × H` and `b` has `4H` entries.

use serde::{Deserialize, Serialize};

use super::linalg::{matvec_acc, matvec_t_acc, sigmoid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LstmGate {
    Input,
    Forget,
    Cell,
    Output,
}

impl LstmGate {
    fn block(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub hidden_size: usize,
    pub input_size: usize,
    pub w_x: Vec<f64>,
    pub w_h: Vec<f64>,
    pub b: Vec<f64>,
}

impl LstmParams {
    pub const GATES: usize = 4;

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

    /// `W_x·` block of one gate, `H × I` row-major.
    pub fn input_weights(&self, gate: LstmGate) -> &[f64] {
        let n = self.hidden_size * self.input_size;
        &self.w_x[gate.block() * n..(gate.block() + 1) * n]
    }

    /// `W_h·` block of one gate, `H × H` row-major.
    pub fn recurrent_weights(&self, gate: LstmGate) -> &[f64] {
        let n = self.hidden_size * self.hidden_size;
        &self.w_h[gate.block() * n..(gate.block() + 1) * n]
    }

    pub fn bias(&self, gate: LstmGate) -> &[f64] {
        let h = self.hidden_size;
        &self.b[gate.block() * h..(gate.block() + 1) * h]
    }

    pub fn validate(&self) -> Result<()> {
        let (h, i) = (self.hidden_size, self.input_size);
        if h == 0 || i == 0 {
            return Err(Error::Shape("LSTM sizes must be positive".into()));
        }
        if self.w_x.len() != 4 * h * i || self.w_h.len() != 4 * h * h || self.b.len() != 4 * h {
            return Err(Error::Shape(format!(
                "LSTM parameter buffers do not match H={h}, I={i}"
            )));
        }
        if self.w_x.iter().chain(&self.w_h).chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("LSTM parameters".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LstmGates {
    pub i: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
    pub gates: LstmGates,
}

impl LstmState {
    pub fn zeros(hidden_size: usize) -> Self {
        Self {
            h: vec![0.0; hidden_size],
            c: vec![0.0; hidden_size],
            gates: LstmGates::default(),
        }
    }
}

/// One LSTM step with shape and finiteness checks.
pub fn lstm_cell(params: &LstmParams, x: &[f64], prev: &LstmState) -> Result<LstmState> {
    params.validate()?;
    let h = params.hidden_size;
    if x.len() != params.input_size || prev.h.len() != h || prev.c.len() != h {
        return Err(Error::Shape(format!(
            "LSTM step expects x[{}], h[{h}], c[{h}]; got x[{}], h[{}], c[{}]",
            params.input_size,
            x.len(),
            prev.h.len(),
            prev.c.len()
        )));
    }
    if x.iter().chain(&prev.h).chain(&prev.c).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("LSTM step input".into()));
    }
    Ok(step(params, x, &prev.h, &prev.c))
}

pub(crate) fn step(params: &LstmParams, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> LstmState {
    let h = params.hidden_size;
    let mut pre = params.b.clone();
    matvec_acc(&mut pre, &params.w_x, x);
    matvec_acc(&mut pre, &params.w_h, h_prev);

    let i: Vec<f64> = pre[..h].iter().map(|&v| sigmoid(v)).collect();
    let f: Vec<f64> = pre[h..2 * h].iter().map(|&v| sigmoid(v)).collect();
    let g: Vec<f64> = pre[2 * h..3 * h].iter().map(|&v| v.tanh()).collect();
    let o: Vec<f64> = pre[3 * h..].iter().map(|&v| sigmoid(v)).collect();
    let c: Vec<f64> = (0..h).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
    let h_new: Vec<f64> = (0..h).map(|k| o[k] * c[k].tanh()).collect();
    LstmState {
        h: h_new,
        c,
        gates: LstmGates { i, f, g, o },
    }
}

/// Reverse pass through one step.
///
/// Takes the gradient flowing into `h'` and `c'`, writes the gate
/// pre-activation gradients into `da` (length `4H`) and returns the
/// gradients for `h` and `c`.
pub(crate) fn step_backward(
    params: &LstmParams,
    c_prev: &[f64],
    state: &LstmState,
    dh: &[f64],
    dc_next: &[f64],
    da: &mut [f64],
) -> (Vec<f64>, Vec<f64>) {
    let h = params.hidden_size;
    let LstmGates { i, f, g, o } = &state.gates;
    let mut dc_prev = vec![0.0; h];
    for k in 0..h {
        let tc = state.c[k].tanh();
        let dc = dc_next[k] + dh[k] * o[k] * (1.0 - tc * tc);
        da[k] = dc * g[k] * i[k] * (1.0 - i[k]);
        da[h + k] = dc * c_prev[k] * f[k] * (1.0 - f[k]);
        da[2 * h + k] = dc * i[k] * (1.0 - g[k] * g[k]);
        da[3 * h + k] = dh[k] * tc * o[k] * (1.0 - o[k]);
        dc_prev[k] = dc * f[k];
    }
    let mut dh_prev = vec![0.0; h];
    matvec_t_acc(&mut dh_prev, &params.w_h, da);
    (dh_prev, dc_prev)
}
