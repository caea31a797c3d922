//! LSTM and GRU forecasters written from scratch: cells, a one-layer network
//! with a scalar head, backpropagation through time, Adam and finite-difference
//! gradient checks.
//!
//! Everything runs in `f64`. Weight files are pretty-printed JSON with a
//! format tag, a shape header and then the flat buffers in the order
//! `w_x`, `w_h`, `b`, `head_w`, `head_b`.

mod adam;
mod gru;
mod linalg;
mod lstm;
mod network;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use gru::{gru_cell, GruGate, GruGates, GruParams};
pub use lstm::{lstm_cell, LstmGate, LstmGates, LstmParams, LstmState};
pub use network::{
    bptt_gradients, grad_check, CellKind, CellParams, ForwardPass, Gradients, RecurrentNetwork, GRAD_CHECK_FLOOR,
};
pub use train::{fit, train, TrainConfig, TrainOutcome};
