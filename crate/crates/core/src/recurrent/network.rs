//! Single-layer recurrent network with a scalar linear head.
//!
//! Flat parameter order (used by the optimizer, gradient checks and the
//! weight file): cell `w_x`, cell `w_h`, cell `b`, `head_w`, `head_b`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gru::{self, GruGates, GruParams};
use super::linalg::{axpy, dot, outer_acc_steps};
use super::lstm::{self, LstmParams, LstmState};
use crate::error::{Error, Result};
use crate::preprocess::WindowedDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Lstm,
    Gru,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Lstm => "lstm",
            CellKind::Gru => "gru",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lstm" => Ok(CellKind::Lstm),
            "gru" => Ok(CellKind::Gru),
            other => Err(Error::InvalidArgument(format!("unknown cell kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CellParams {
    Lstm(LstmParams),
    Gru(GruParams),
}

impl CellParams {
    fn zeros(kind: CellKind, hidden_size: usize, input_size: usize) -> Self {
        match kind {
            CellKind::Lstm => CellParams::Lstm(LstmParams::zeros(hidden_size, input_size)),
            CellKind::Gru => CellParams::Gru(GruParams::zeros(hidden_size, input_size)),
        }
    }

    pub fn kind(&self) -> CellKind {
        match self {
            CellParams::Lstm(_) => CellKind::Lstm,
            CellParams::Gru(_) => CellKind::Gru,
        }
    }

    fn buffers(&self) -> [&Vec<f64>; 3] {
        match self {
            CellParams::Lstm(p) => [&p.w_x, &p.w_h, &p.b],
            CellParams::Gru(p) => [&p.w_x, &p.w_h, &p.b],
        }
    }

    fn buffers_mut(&mut self) -> [&mut Vec<f64>; 3] {
        match self {
            CellParams::Lstm(p) => [&mut p.w_x, &mut p.w_h, &mut p.b],
            CellParams::Gru(p) => [&mut p.w_x, &mut p.w_h, &mut p.b],
        }
    }

    fn sizes(&self) -> (usize, usize) {
        match self {
            CellParams::Lstm(p) => (p.hidden_size, p.input_size),
            CellParams::Gru(p) => (p.hidden_size, p.input_size),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            CellParams::Lstm(p) => p.validate(),
            CellParams::Gru(p) => p.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrentNetwork {
    pub cell: CellParams,
    pub head_w: Vec<f64>,
    pub head_b: f64,
    pub seed: u64,
}

/// Per-step values kept for the reverse pass.
#[derive(Debug, Clone)]
enum StepCache {
    Lstm(Vec<LstmState>),
    Gru(Vec<(Vec<f64>, GruGates)>),
}

/// Result of running one window through the network.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub prediction: f64,
    /// Hidden state after the last window element.
    pub hidden: Vec<f64>,
    /// Number of cell steps taken.
    pub cell_evaluations: usize,
    cache: StepCache,
}

/// Batch-averaged gradients in flat parameter order.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub values: Vec<f64>,
    pub loss: f64,
    /// Global L2 norm before clipping.
    pub norm: f64,
    pub clipped: bool,
}

impl RecurrentNetwork {
    /// Weights drawn uniformly from ±1/√hidden_size by a ChaCha8 stream
    /// seeded with `seed`, in flat parameter order.
    pub fn new(kind: CellKind, hidden_size: usize, seed: u64) -> Result<Self> {
        if hidden_size == 0 {
            return Err(Error::InvalidArgument("hidden size must be at least 1".into()));
        }
        let mut net = Self::zeros(kind, hidden_size);
        net.seed = seed;
        let bound = 1.0 / (hidden_size as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init: Vec<f64> = (0..net.num_parameters())
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        net.set_parameters(&init)?;
        Ok(net)
    }

    /// Every weight and bias zero.
    pub fn zeros(kind: CellKind, hidden_size: usize) -> Self {
        Self {
            cell: CellParams::zeros(kind, hidden_size, 1),
            head_w: vec![0.0; hidden_size],
            head_b: 0.0,
            seed: 0,
        }
    }

    pub fn kind(&self) -> CellKind {
        self.cell.kind()
    }

    pub fn hidden_size(&self) -> usize {
        self.cell.sizes().0
    }

    pub fn num_parameters(&self) -> usize {
        self.cell.buffers().iter().map(|b| b.len()).sum::<usize>() + self.head_w.len() + 1
    }

    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_parameters());
        for b in self.cell.buffers() {
            out.extend_from_slice(b);
        }
        out.extend_from_slice(&self.head_w);
        out.push(self.head_b);
        out
    }

    pub fn set_parameters(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_parameters() {
            return Err(Error::Shape(format!(
                "expected {} parameters, got {}",
                self.num_parameters(),
                flat.len()
            )));
        }
        let mut at = 0;
        for b in self.cell.buffers_mut() {
            let n = b.len();
            b.copy_from_slice(&flat[at..at + n]);
            at += n;
        }
        let h = self.head_w.len();
        self.head_w.copy_from_slice(&flat[at..at + h]);
        self.head_b = flat[at + h];
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.cell.validate()?;
        let (h, i) = self.cell.sizes();
        if i != 1 {
            return Err(Error::Shape(format!("network input size must be 1, got {i}")));
        }
        if self.head_w.len() != h {
            return Err(Error::Shape(format!(
                "head has {} weights for hidden size {h}",
                self.head_w.len()
            )));
        }
        if !self.head_b.is_finite() || self.head_w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("network head".into()));
        }
        Ok(())
    }

    /// Runs `window` through the cell from a zero state and applies the head.
    pub fn forward(&self, window: &[f64]) -> Result<ForwardPass> {
        if window.is_empty() {
            return Err(Error::Empty("forward pass needs a non-empty window"));
        }
        if window.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("input window".into()));
        }
        Ok(self.forward_unchecked(window))
    }

    fn forward_unchecked(&self, window: &[f64]) -> ForwardPass {
        let h = self.hidden_size();
        let mut evaluations = 0;
        let (hidden, cache) = match &self.cell {
            CellParams::Lstm(p) => {
                let mut states: Vec<LstmState> = Vec::with_capacity(window.len());
                let zero = vec![0.0; h];
                for x in window {
                    let (hp, cp) = states.last().map_or((&zero, &zero), |s| (&s.h, &s.c));
                    let next = lstm::step(p, std::slice::from_ref(x), hp, cp);
                    evaluations += 1;
                    states.push(next);
                }
                (
                    states.last().map(|s| s.h.clone()).unwrap_or(zero),
                    StepCache::Lstm(states),
                )
            }
            CellParams::Gru(p) => {
                let mut states: Vec<(Vec<f64>, GruGates)> = Vec::with_capacity(window.len());
                let zero = vec![0.0; h];
                for x in window {
                    let hp = states.last().map_or(&zero, |s| &s.0);
                    let next = gru::step(p, std::slice::from_ref(x), hp);
                    evaluations += 1;
                    states.push(next);
                }
                (
                    states.last().map(|s| s.0.clone()).unwrap_or(zero),
                    StepCache::Gru(states),
                )
            }
        };
        ForwardPass {
            prediction: dot(&self.head_w, &hidden) + self.head_b,
            hidden,
            cell_evaluations: evaluations,
            cache,
        }
    }

    pub fn predict(&self, window: &[f64]) -> Result<f64> {
        self.forward(window).map(|f| f.prediction)
    }

    /// Predictions for every window of `data`.
    pub fn predict_all(&self, data: &WindowedDataset) -> Result<Vec<f64>> {
        data.inputs().map(|w| self.predict(w)).collect()
    }

    /// Adds dL/dθ for one sample to `grad`, given dL/dprediction.
    fn backward(&self, grad: &mut RecurrentNetwork, window: &[f64], pass: &ForwardPass, dpred: f64) {
        let h = self.hidden_size();
        for (g, hv) in grad.head_w.iter_mut().zip(&pass.hidden) {
            *g += dpred * hv;
        }
        grad.head_b += dpred;
        let mut dh: Vec<f64> = self.head_w.iter().map(|w| w * dpred).collect();
        let steps = window.len();
        match (&self.cell, &mut grad.cell, &pass.cache) {
            (CellParams::Lstm(p), CellParams::Lstm(g), StepCache::Lstm(states)) => {
                let rows = 4 * h;
                let mut deltas = vec![0.0; steps * rows];
                let mut dc = vec![0.0; h];
                let zero = vec![0.0; h];
                for t in (0..steps).rev() {
                    let cp = if t == 0 { &zero } else { &states[t - 1].c };
                    let da = &mut deltas[t * rows..(t + 1) * rows];
                    (dh, dc) = lstm::step_backward(p, cp, &states[t], &dh, &dc, da);
                }
                let h_prev = previous_hidden(states.iter().map(|s| s.h.as_slice()), h, steps);
                accumulate(&mut g.b, &mut g.w_x, &mut g.w_h, &deltas, &deltas, window, &h_prev, h);
            }
            (CellParams::Gru(p), CellParams::Gru(g), StepCache::Gru(states)) => {
                let rows = 3 * h;
                let mut dx_pre = vec![0.0; steps * rows];
                let mut dh_pre = vec![0.0; steps * rows];
                let zero = vec![0.0; h];
                for t in (0..steps).rev() {
                    let hp = if t == 0 { &zero } else { &states[t - 1].0 };
                    let span = t * rows..(t + 1) * rows;
                    dh = gru::step_backward(p, hp, &states[t].1, &dh, &mut dx_pre[span.clone()], &mut dh_pre[span]);
                }
                let h_prev = previous_hidden(states.iter().map(|s| s.0.as_slice()), h, steps);
                accumulate(&mut g.b, &mut g.w_x, &mut g.w_h, &dx_pre, &dh_pre, window, &h_prev, h);
            }
            _ => unreachable!("gradient buffer and cache always match the cell kind"),
        }
    }

    /// Loss and averaged gradients over samples `range` of `data`.
    pub(crate) fn batch_gradients(
        &self,
        data: &WindowedDataset,
        range: std::ops::Range<usize>,
        clip: Option<f64>,
    ) -> Result<Gradients> {
        if range.is_empty() || range.end > data.len() {
            return Err(Error::Empty("gradient batch must be a non-empty range of the dataset"));
        }
        let b = range.len() as f64;
        let mut grad = Self::zeros(self.kind(), self.hidden_size());
        let mut loss = 0.0;
        for i in range {
            let window = data.input(i);
            let pass = self.forward_unchecked(window);
            let err = pass.prediction - data.targets[i];
            loss += err * err;
            self.backward(&mut grad, window, &pass, 2.0 * err / b);
        }
        loss /= b;
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("batch loss {loss}")));
        }
        let mut values = grad.parameters();
        let norm = values.iter().map(|g| g * g).sum::<f64>().sqrt();
        let mut clipped = false;
        if let Some(max) = clip {
            if norm > max {
                let s = max / norm;
                values.iter_mut().for_each(|g| *g *= s);
                clipped = true;
            }
        }
        Ok(Gradients {
            values,
            loss,
            norm,
            clipped,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&WeightFile::from(self)).expect("weights serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WeightFile = serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        file.into_network()
    }
}

/// `[0, h_0, …, h_{T−2}]` flattened step-major.
fn previous_hidden<'a>(states: impl Iterator<Item = &'a [f64]>, h: usize, steps: usize) -> Vec<f64> {
    let mut out = vec![0.0; h];
    out.reserve(h * steps);
    for s in states.take(steps - 1) {
        out.extend_from_slice(s);
    }
    out
}

/// Folds per-step pre-activation gradients into the parameter gradients.
#[allow(clippy::too_many_arguments)]
fn accumulate(
    b: &mut [f64],
    w_x: &mut [f64],
    w_h: &mut [f64],
    dx_pre: &[f64],
    dh_pre: &[f64],
    window: &[f64],
    h_prev: &[f64],
    h: usize,
) {
    let rows = b.len();
    for step in dx_pre.chunks_exact(rows) {
        axpy(b, 1.0, step);
    }
    outer_acc_steps(w_x, dx_pre, window, rows, 1);
    outer_acc_steps(w_h, dh_pre, h_prev, rows, h);
}

/// Mean squared error loss and exact reverse-mode gradients over a batch,
/// with optional global-norm clipping.
pub fn bptt_gradients(net: &RecurrentNetwork, batch: &WindowedDataset, clip: Option<f64>) -> Result<Gradients> {
    net.validate()?;
    net.batch_gradients(batch, 0..batch.len(), clip)
}

/// Denominator guard in [`grad_check`].
pub const GRAD_CHECK_FLOOR: f64 = 1e-6;

/// Worst `|analytic − numeric| / max(|analytic|, |numeric|, floor)` over all
/// parameters, with central differences of step `eps` on one sample.
pub fn grad_check(net: &RecurrentNetwork, window: &[f64], target: f64, eps: f64) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {eps} outside [1e-7, 1e-3]"
        )));
    }
    let sample = WindowedDataset::from_samples(&[(window.to_vec(), target)])?;
    let analytic = bptt_gradients(net, &sample, None)?.values;
    let base = net.parameters();
    let mut probe = net.clone();
    let loss_at = |probe: &mut RecurrentNetwork, theta: &[f64]| -> Result<f64> {
        probe.set_parameters(theta)?;
        let e = probe.forward_unchecked(window).prediction - target;
        Ok(e * e)
    };
    let mut theta = base.clone();
    let mut worst = 0.0f64;
    for k in 0..base.len() {
        theta[k] = base[k] + eps;
        let up = loss_at(&mut probe, &theta)?;
        theta[k] = base[k] - eps;
        let down = loss_at(&mut probe, &theta)?;
        theta[k] = base[k];
        let numeric = (up - down) / (2.0 * eps);
        let denom = analytic[k].abs().max(numeric.abs()).max(GRAD_CHECK_FLOOR);
        worst = worst.max((analytic[k] - numeric).abs() / denom);
    }
    Ok(worst)
}

/// On-disk weight layout. Field order is fixed by declaration order.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFile {
    format: String,
    kind: CellKind,
    hidden_size: usize,
    input_size: usize,
    seed: u64,
    /// `[rows, cols]` of `w_x`, `w_h`, then `[len]` of `b` and `head_w`.
    shapes: WeightShapes,
    w_x: Vec<f64>,
    w_h: Vec<f64>,
    b: Vec<f64>,
    head_w: Vec<f64>,
    head_b: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct WeightShapes {
    w_x: [usize; 2],
    w_h: [usize; 2],
    b: [usize; 1],
    head_w: [usize; 1],
}

const WEIGHT_FORMAT: &str = "horizonbench-rnn-v1";

impl WeightShapes {
    fn expected(kind: CellKind, h: usize, i: usize) -> Self {
        let gates = match kind {
            CellKind::Lstm => LstmParams::GATES,
            CellKind::Gru => GruParams::GATES,
        };
        Self {
            w_x: [gates * h, i],
            w_h: [gates * h, h],
            b: [gates * h],
            head_w: [h],
        }
    }
}

impl From<&RecurrentNetwork> for WeightFile {
    fn from(net: &RecurrentNetwork) -> Self {
        let (h, i) = net.cell.sizes();
        let [w_x, w_h, b] = net.cell.buffers();
        Self {
            format: WEIGHT_FORMAT.into(),
            kind: net.kind(),
            hidden_size: h,
            input_size: i,
            seed: net.seed,
            shapes: WeightShapes::expected(net.kind(), h, i),
            w_x: w_x.clone(),
            w_h: w_h.clone(),
            b: b.clone(),
            head_w: net.head_w.clone(),
            head_b: net.head_b,
        }
    }
}

impl WeightFile {
    fn into_network(self) -> Result<RecurrentNetwork> {
        if self.format != WEIGHT_FORMAT {
            return Err(Error::Serde(format!("unsupported weight format '{}'", self.format)));
        }
        if self.shapes != WeightShapes::expected(self.kind, self.hidden_size, self.input_size) {
            return Err(Error::Shape("weight file shape header does not match its sizes".into()));
        }
        let (h, i) = (self.hidden_size, self.input_size);
        let cell = match self.kind {
            CellKind::Lstm => CellParams::Lstm(LstmParams {
                hidden_size: h,
                input_size: i,
                w_x: self.w_x,
                w_h: self.w_h,
                b: self.b,
            }),
            CellKind::Gru => CellParams::Gru(GruParams {
                hidden_size: h,
                input_size: i,
                w_x: self.w_x,
                w_h: self.w_h,
                b: self.b,
            }),
        };
        let net = RecurrentNetwork {
            cell,
            head_w: self.head_w,
            head_b: self.head_b,
            seed: self.seed,
        };
        net.validate()?;
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrent::{gru_cell, lstm_cell};

    const KINDS: [CellKind; 2] = [CellKind::Lstm, CellKind::Gru];

    #[test]
    fn dead_network_predicts_head_bias() {
        for kind in KINDS {
            let mut net = RecurrentNetwork::zeros(kind, 5);
            net.head_b = 0.75;
            assert_eq!(net.predict(&[0.3, -1.0, 2.0]).unwrap(), 0.75);
        }
    }

    #[test]
    fn init_is_bounded_and_seeded() {
        for kind in KINDS {
            let a = RecurrentNetwork::new(kind, 16, 3).unwrap();
            let bound = 0.25;
            assert!(a.parameters().iter().all(|v| v.abs() <= bound));
            assert!(a.parameters().iter().any(|v| v.abs() > 0.2));
            assert_eq!(a, RecurrentNetwork::new(kind, 16, 3).unwrap());
            assert_ne!(a.parameters(), RecurrentNetwork::new(kind, 16, 4).unwrap().parameters());
        }
        assert_eq!(
            RecurrentNetwork::zeros(CellKind::Lstm, 64).num_parameters(),
            4 * 64 * 66 + 65
        );
        assert_eq!(
            RecurrentNetwork::zeros(CellKind::Gru, 64).num_parameters(),
            3 * 64 * 66 + 65
        );
    }

    #[test]
    fn unrolled_oracle() {
        let window = [0.1, 0.2, 0.3];
        for kind in KINDS {
            let net = RecurrentNetwork::new(kind, 4, 11).unwrap();
            let mut h = vec![0.0; 4];
            match &net.cell {
                CellParams::Lstm(p) => {
                    let mut s = LstmState::zeros(4);
                    for x in window {
                        s = lstm_cell(p, &[x], &s).unwrap();
                    }
                    h = s.h;
                }
                CellParams::Gru(p) => {
                    for x in window {
                        h = gru_cell(p, &[x], &h).unwrap().0;
                    }
                }
            }
            let expected: f64 = net.head_w.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + net.head_b;
            let pass = net.forward(&window).unwrap();
            assert!((pass.prediction - expected).abs() < 1e-12);
            assert_eq!(pass.cell_evaluations, 3);
        }
    }

    #[test]
    fn single_step_window() {
        let net = RecurrentNetwork::new(CellKind::Gru, 3, 2).unwrap();
        let CellParams::Gru(p) = &net.cell else { unreachable!() };
        let (h, _) = gru_cell(p, &[0.4], &[0.0; 3]).unwrap();
        let expected: f64 = net.head_w.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + net.head_b;
        assert_eq!(net.predict(&[0.4]).unwrap(), expected);
    }

    #[test]
    fn forward_errors() {
        let net = RecurrentNetwork::zeros(CellKind::Lstm, 2);
        assert!(matches!(net.forward(&[]), Err(Error::Empty(_))));
        assert!(matches!(net.forward(&[f64::NAN]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn exact_fit_has_zero_gradient() {
        for kind in KINDS {
            let net = RecurrentNetwork::new(kind, 4, 9).unwrap();
            let windows = [vec![0.1, 0.5], vec![0.9, 0.3], vec![0.2, 0.2]];
            let samples: Vec<_> = windows.iter().map(|w| (w.clone(), net.predict(w).unwrap())).collect();
            let data = WindowedDataset::from_samples(&samples).unwrap();
            let g = bptt_gradients(&net, &data, Some(5.0)).unwrap();
            assert_eq!(g.loss, 0.0);
            assert!(g.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn duplicated_batch_has_same_gradient() {
        for kind in KINDS {
            let net = RecurrentNetwork::new(kind, 5, 21).unwrap();
            let samples = vec![
                (vec![0.1, 0.4, 0.2], 0.7),
                (vec![0.6, 0.1, 0.9], 0.2),
                (vec![0.3, 0.3, 0.5], 0.4),
            ];
            let doubled: Vec<_> = samples.iter().flat_map(|s| [s.clone(), s.clone()]).collect();
            let a = bptt_gradients(&net, &WindowedDataset::from_samples(&samples).unwrap(), None).unwrap();
            let b = bptt_gradients(&net, &WindowedDataset::from_samples(&doubled).unwrap(), None).unwrap();
            assert!((a.loss - b.loss).abs() < 1e-12);
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn clipping_caps_the_norm() {
        let net = RecurrentNetwork::new(CellKind::Lstm, 4, 1).unwrap();
        let data = WindowedDataset::from_samples(&[(vec![0.5, 0.5], 40.0)]).unwrap();
        let g = bptt_gradients(&net, &data, Some(1.0)).unwrap();
        assert!(g.clipped && g.norm > 1.0);
        let clipped_norm = g.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((clipped_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gradients_match_finite_differences() {
        for kind in KINDS {
            for seed in 0..10 {
                let net = RecurrentNetwork::new(kind, 4, seed).unwrap();
                let window = [0.2, -0.4, 0.9, 0.1, 0.5];
                let err = grad_check(&net, &window, 0.3, 1e-5).unwrap();
                assert!(err < 1e-4, "{kind} seed {seed}: {err}");
            }
        }
    }

    #[test]
    fn grad_check_on_dead_network() {
        for kind in KINDS {
            let err = grad_check(&RecurrentNetwork::zeros(kind, 3), &[0.5, 0.1], 1.0, 1e-5).unwrap();
            assert!(err.is_finite() && err < 1e-4);
        }
        let net = RecurrentNetwork::zeros(CellKind::Gru, 2);
        assert!(grad_check(&net, &[0.5], 1.0, 1e-2).is_err());
    }

    #[test]
    fn weight_file_roundtrip() {
        for kind in KINDS {
            let net = RecurrentNetwork::new(kind, 3, 8).unwrap();
            let text = net.to_json();
            assert_eq!(RecurrentNetwork::from_json(&text).unwrap(), net);
            assert!(text.find("\"format\"").unwrap() < text.find("\"w_x\"").unwrap());
            let broken = text.replacen("\"hidden_size\": 3", "\"hidden_size\": 4", 1);
            assert!(RecurrentNetwork::from_json(&broken).is_err());
        }
    }

    #[test]
    fn cell_kind_parsing() {
        assert_eq!("LSTM".parse::<CellKind>().unwrap(), CellKind::Lstm);
        assert_eq!("gru".parse::<CellKind>().unwrap(), CellKind::Gru);
        assert!("rnn".parse::<CellKind>().is_err());
    }
}
