//! Point-forecast error metrics: MSE, RMSE, MAE, MAPE and R².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check(pred: &[f64], actual: &[f64]) -> Result<()> {
    if pred.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: actual.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::Empty("metrics need at least one prediction"));
    }
    Ok(())
}

fn mean_of(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Mean squared error.
pub fn mse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check(pred, actual)?;
    Ok(mean_of(
        pred.iter().zip(actual).map(|(p, a)| (p - a).powi(2)),
        pred.len(),
    ))
}

/// Root mean squared error.
pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    mse(pred, actual).map(f64::sqrt)
}

/// Mean absolute error.
pub fn mae(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check(pred, actual)?;
    Ok(mean_of(pred.iter().zip(actual).map(|(p, a)| (p - a).abs()), pred.len()))
}

/// Mean absolute percentage error, in percent. Undefined if any actual is zero.
pub fn mape(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check(pred, actual)?;
    if actual.contains(&0.0) {
        return Err(Error::UndefinedMetric("MAPE with a zero actual value"));
    }
    Ok(100.0 * mean_of(pred.iter().zip(actual).map(|(p, a)| ((p - a) / a).abs()), pred.len()))
}

/// Coefficient of determination, 1 − SS_res / SS_tot. Negative when the
/// predictions do worse than the mean of the actuals.
pub fn r2(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check(pred, actual)?;
    if actual.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: actual.len(),
        });
    }
    let mean = mean_of(actual.iter().copied(), actual.len());
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedMetric("R² with constant actual values"));
    }
    let ss_res: f64 = pred.iter().zip(actual).map(|(p, a)| (a - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// All five metrics over one prediction/actual pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub r2: f64,
    pub rmse: f64,
    pub mse: f64,
    pub mae: f64,
    /// `None` when an actual value is zero.
    pub mape_percent: Option<f64>,
    pub n: usize,
}

pub fn evaluate(pred: &[f64], actual: &[f64]) -> Result<MetricReport> {
    let mse = mse(pred, actual)?;
    let mape_percent = match mape(pred, actual) {
        Ok(v) => Some(v),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricReport {
        r2: r2(pred, actual)?,
        rmse: mse.sqrt(),
        mse,
        mae: mae(pred, actual)?,
        mape_percent,
        n: pred.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_predictions() {
        let a = [3.0, 1.0, 4.0, 1.5];
        let r = evaluate(&a, &a).unwrap();
        assert_eq!(
            (r.mse, r.rmse, r.mae, r.mape_percent, r.r2),
            (0.0, 0.0, 0.0, Some(0.0), 1.0)
        );
        assert_eq!(r.n, 4);
    }

    #[test]
    fn hand_values() {
        assert!((mse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((mae(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((mape(&[110.0], &[100.0]).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn mean_baseline_has_zero_r2() {
        let a = [2.0, 4.0, 9.0, 1.0];
        let mean = a.iter().sum::<f64>() / 4.0;
        assert!(r2(&[mean; 4], &a).unwrap().abs() < 1e-15);
    }

    #[test]
    fn r2_can_be_far_below_minus_one() {
        let a = [1.0, 2.0, 3.0];
        assert!(r2(&[10.0, -5.0, 9.0], &a).unwrap() < -1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(mse(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(rmse(&[], &[]), Err(Error::Empty(_))));
        assert!(matches!(mape(&[1.0, 2.0], &[0.0, 2.0]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(r2(&[1.0, 2.0], &[3.0, 3.0]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(r2(&[1.0], &[3.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn evaluate_flags_undefined_mape() {
        let r = evaluate(&[1.0, 2.0, 3.0], &[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(r.mape_percent, None);
        assert!(r.mse > 0.0);
    }

    /// Published rows whose RMSE and MSE agree at the printed precision.
    #[test]
    fn published_rmse_mse_pairs() {
        for (rmse_v, mse_v) in [(1.1707, 1.3705), (1.1139, 1.2408), (0.1171, 0.0137), (0.3727, 0.1389)] {
            let rounded = (f64::powi(rmse_v, 2) * 1e4).round() / 1e4;
            assert!((rounded - mse_v).abs() < 1e-9, "{rmse_v}² vs {mse_v}");
        }
        // 0.1013² = 0.0103, not the printed 0.0048.
        assert!((0.1013f64.powi(2) - 0.0048).abs() > 1e-3);
    }

    fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(-100.0f64..100.0, n),
                prop::collection::vec(-100.0f64..100.0, n),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rmse_squared_is_mse((p, a) in pair()) {
            let m = mse(&p, &a).unwrap();
            let r = rmse(&p, &a).unwrap();
            prop_assert!((r * r - m).abs() <= 1e-12 * m.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn mae_never_exceeds_rmse((p, a) in pair()) {
            prop_assert!(mae(&p, &a).unwrap() <= rmse(&p, &a).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn r2_is_one_minus_mse_over_variance((p, a) in pair()) {
            let n = a.len() as f64;
            let mean = a.iter().sum::<f64>() / n;
            let var = a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            prop_assume!(var > 1e-9);
            let direct = 1.0 - mse(&p, &a).unwrap() / var;
            prop_assert!((r2(&p, &a).unwrap() - direct).abs() <= 1e-9 * direct.abs().max(1.0));
        }

        #[test]
        fn shift_invariance((p, a) in pair(), k in -50.0f64..50.0) {
            let ps: Vec<f64> = p.iter().map(|v| v + k).collect();
            let as_: Vec<f64> = a.iter().map(|v| v + k).collect();
            let tol = 1e-9;
            prop_assert!((mse(&ps, &as_).unwrap() - mse(&p, &a).unwrap()).abs() < tol * 1e4);
            prop_assert!((mae(&ps, &as_).unwrap() - mae(&p, &a).unwrap()).abs() < tol * 1e2);
            // R² is shift-invariant too; MAPE changes and must match a direct recomputation.
            if a.iter().map(|v| v - a[0]).any(|d| d.abs() > 1e-6) {
                prop_assert!((r2(&ps, &as_).unwrap() - r2(&p, &a).unwrap()).abs() < 1e-6);
            }
            if as_.iter().all(|v| v.abs() > 1e-3) {
                let direct = 100.0 * ps.iter().zip(&as_).map(|(x, y)| ((x - y) / y).abs()).sum::<f64>() / n_of(&as_);
                prop_assert!((mape(&ps, &as_).unwrap() - direct).abs() <= 1e-9 * direct.max(1.0));
            }
        }

        #[test]
        fn report_is_self_consistent((p, a) in pair()) {
            prop_assume!(a.iter().any(|v| (v - a[0]).abs() > 1e-6));
            let r = evaluate(&p, &a).unwrap();
            prop_assert!((r.rmse * r.rmse - r.mse).abs() <= 1e-12 * r.mse.max(f64::MIN_POSITIVE));
            prop_assert!(r.mse >= 0.0 && r.mae >= 0.0 && r.r2 <= 1.0);
            prop_assert_eq!(r.n, p.len());
        }
    }

    fn n_of(v: &[f64]) -> f64 {
        v.len() as f64
    }
}
