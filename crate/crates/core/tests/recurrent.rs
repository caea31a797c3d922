use horizonbench::preprocess::{make_windows, MinMaxScaler};
use horizonbench::recurrent::{fit, CellKind, TrainConfig};

fn scaled_sine(n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|t| 10.0 + 3.0 * (2.0 * std::f64::consts::PI * t as f64 / 60.0).sin())
        .collect();
    let scaler = MinMaxScaler::fit(&raw).unwrap();
    scaler.transform_all(&raw)
}

#[test]
fn learns_a_sine_wave() {
    let data = make_windows(&scaled_sine(400), 30).unwrap();
    let cfg = TrainConfig {
        seed: 7,
        ..TrainConfig::default()
    };
    for kind in [CellKind::Lstm, CellKind::Gru] {
        let start = std::time::Instant::now();
        let out = fit(kind, 64, &data, &cfg).unwrap();
        eprintln!(
            "{kind}: final {:.3e} first {:.3e} in {:?}",
            out.final_loss,
            out.loss_history[0],
            start.elapsed()
        );
        assert!(out.final_loss < 0.01, "{kind}: {}", out.final_loss);
        assert!(out.loss_history.last().unwrap() < &out.loss_history[0]);
    }
}
