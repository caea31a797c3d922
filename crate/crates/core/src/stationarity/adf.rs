use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ols::ols_fit;
use crate::error::{Error, Result};

/// Large-sample critical values for the constant-only (no trend) regression.
pub const CRIT_1PCT: f64 = -3.43;
pub const CRIT_5PCT: f64 = -2.86;
pub const CRIT_10PCT: f64 = -2.57;

/// Shortest series the test accepts.
pub const MIN_LENGTH: usize = 20;

/// How `p_value` is obtained; carried in serialized output.
pub const P_VALUE_METHOD: &str = "linear interpolation across the 1%/5%/10% critical values, clamped to [0.001, 0.999]";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// t-ratio of the lagged level coefficient.
    pub statistic: f64,
    pub p_value: f64,
    pub crit_1pct: f64,
    pub crit_5pct: f64,
    pub crit_10pct: f64,
    pub lags_used: usize,
    /// Observations entering the regression.
    pub n_obs: usize,
    pub reject_at_5pct: bool,
}

/// `floor(12 · (n/100)^¼)`
pub fn schwert_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Approximate p-value from the three tabulated anchors.
///
/// Piecewise linear through (crit, level) pairs, extended linearly past the
/// ends, then clamped. Monotone in the statistic, so `p < 0.05` exactly when
/// the statistic is below the 5% critical value.
pub fn interpolate_p_value(statistic: f64) -> f64 {
    const ANCHORS: [(f64, f64); 3] = [(CRIT_1PCT, 0.01), (CRIT_5PCT, 0.05), (CRIT_10PCT, 0.10)];
    let (a, b) = if statistic <= ANCHORS[1].0 {
        (ANCHORS[0], ANCHORS[1])
    } else {
        (ANCHORS[1], ANCHORS[2])
    };
    let p = a.1 + (statistic - a.0) * (b.1 - a.1) / (b.0 - a.0);
    p.clamp(0.001, 0.999)
}

/// Augmented Dickey-Fuller test with a constant and no trend:
///
/// Δy_t = α + γ·y_{t−1} + Σ_{i=1..L} δ_i·Δy_{t−i} + ε_t
///
/// `max_lag` overrides the Schwert default for L. The lag count is reduced
/// when the series cannot support it with at least one residual degree of freedom.
pub fn adf_test(values: &[f64], max_lag: Option<usize>) -> Result<AdfResult> {
    let n = values.len();
    if n < MIN_LENGTH {
        return Err(Error::TooShort {
            needed: MIN_LENGTH,
            got: n,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ADF input".into()));
    }
    if values.iter().all(|&v| v == values[0]) {
        return Err(Error::Constant("ADF test on a constant series"));
    }
    // n_obs = n − L − 1 observations, L + 2 regressors.
    let feasible = (n - 4) / 2;
    let lags = max_lag.unwrap_or_else(|| schwert_lags(n)).min(feasible);

    let dy: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let n_obs = n - lags - 1;
    let k = lags + 2;
    // Row r corresponds to t = lags + 1 + r; dy[t − 1] = y_t − y_{t−1}.
    let x = DMatrix::from_fn(n_obs, k, |r, j| {
        let t = lags + 1 + r;
        match j {
            0 => 1.0,
            1 => values[t - 1],
            i => dy[t - 1 - (i - 1)],
        }
    });
    let y: Vec<f64> = (0..n_obs).map(|r| dy[lags + r]).collect();

    let fit = ols_fit(&x, &y)?;
    if !(fit.std_errors[1] > 0.0) {
        return Err(Error::Constant("ADF regression fits exactly; series is degenerate"));
    }
    let statistic = fit.t_ratio(1);
    Ok(AdfResult {
        statistic,
        p_value: interpolate_p_value(statistic),
        crit_1pct: CRIT_1PCT,
        crit_5pct: CRIT_5PCT,
        crit_10pct: CRIT_10PCT,
        lags_used: lags,
        n_obs,
        reject_at_5pct: statistic < CRIT_5PCT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn cumsum(v: &[f64]) -> Vec<f64> {
        v.iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }

    #[test]
    fn schwert_rule() {
        assert_eq!(schwert_lags(100), 12);
        assert_eq!(schwert_lags(500), 17);
        assert_eq!(schwert_lags(1258), 22);
    }

    #[test]
    fn white_noise_rejects_random_walk_does_not() {
        let e = noise(42, 500);
        let wn = adf_test(&e, None).unwrap();
        assert!(wn.statistic < CRIT_1PCT, "{wn:?}");
        assert!(wn.reject_at_5pct);
        let rw = adf_test(&cumsum(&e), None).unwrap();
        assert!(rw.statistic > CRIT_5PCT, "{rw:?}");
        assert!(!rw.reject_at_5pct);
    }

    #[test]
    fn reports_constant_critical_values() {
        let r = adf_test(&noise(1, 60), Some(2)).unwrap();
        assert_eq!((r.crit_1pct, r.crit_5pct, r.crit_10pct), (-3.43, -2.86, -2.57));
        assert_eq!(r.lags_used, 2);
        assert_eq!(r.n_obs, 57);
        assert_eq!(r.reject_at_5pct, r.statistic < r.crit_5pct);
        assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn p_value_is_monotone_and_anchored() {
        assert!((interpolate_p_value(CRIT_1PCT) - 0.01).abs() < 1e-15);
        assert!((interpolate_p_value(CRIT_5PCT) - 0.05).abs() < 1e-15);
        assert!((interpolate_p_value(CRIT_10PCT) - 0.10).abs() < 1e-15);
        assert_eq!(interpolate_p_value(-35.73), 0.001);
        assert_eq!(interpolate_p_value(10.0), 0.999);
        let mut prev = 0.0;
        for i in 0..2000 {
            let p = interpolate_p_value(-20.0 + i as f64 * 0.0125);
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn statistic_is_affine_invariant() {
        let e = noise(5, 300);
        let base = adf_test(&e, None).unwrap().statistic;
        let shifted: Vec<f64> = e.iter().map(|v| 250.0 + 3.5 * v).collect();
        let moved = adf_test(&shifted, None).unwrap().statistic;
        assert!((base - moved).abs() < 1e-6, "{base} vs {moved}");
    }

    #[test]
    fn rejects_short_and_constant() {
        assert!(matches!(adf_test(&[1.0; 19], None), Err(Error::TooShort { .. })));
        assert!(matches!(adf_test(&[3.0; 40], None), Err(Error::Constant(_))));
    }
}
