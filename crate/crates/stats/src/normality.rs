//! D'Agostino–Pearson K² omnibus normality test.
//!
//! Combines the D'Agostino skewness transform with the Anscombe–Glynn
//! kurtosis transform; K² = Z₁² + Z₂² is referred to chi-squared with two
//! degrees of freedom.

use crate::special::chi2_sf;
use crate::{StatsError, TestResult};

/// Minimum sample size: the kurtosis transform is unreliable below ~20.
const MIN_SAMPLE: usize = 20;

/// Two-sided D'Agostino–Pearson K² test of departure from normality.
pub fn dagostino_k2(sample: &[f64]) -> Result<TestResult, StatsError> {
    let n = sample.len();
    if n < MIN_SAMPLE {
        return Err(StatsError::SampleTooSmall { n });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    // Constant samples have zero variance regardless of what rounding does
    // to the accumulated moments.
    if sample.windows(2).all(|w| w[0] == w[1]) {
        return Err(StatsError::ZeroVariance);
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }

    let g1 = m3 / m2.powf(1.5);
    let b2 = m4 / (m2 * m2);
    let z_skew = skewness_z(g1, nf);
    let z_kurt = kurtosis_z(b2, nf)?;
    let k2 = z_skew * z_skew + z_kurt * z_kurt;
    let p_value = chi2_sf(k2, 2)?;

    Ok(TestResult {
        statistic: k2,
        p_value,
        group_sizes: vec![n],
        method: "dagostino-k2",
        notes: String::new(),
    })
}

/// D'Agostino (1970) transform of sample skewness to an approximate
/// standard normal deviate.
fn skewness_z(g1: f64, n: f64) -> f64 {
    let y = g1 * (((n + 1.0) * (n + 3.0)) / (6.0 * (n - 2.0))).sqrt();
    let beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    let w2 = -1.0 + (2.0 * (beta2 - 1.0)).sqrt();
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    // asinh form of delta * ln(y/alpha + sqrt((y/alpha)² + 1)); exact at
    // y = 0 where the transform is zero by symmetry.
    delta * (y / alpha).asinh()
}

/// Anscombe–Glynn (1983) transform of sample kurtosis to an approximate
/// standard normal deviate via a Wilson–Hilferty cube root.
fn kurtosis_z(b2: f64, n: f64) -> Result<f64, StatsError> {
    let expected = 3.0 * (n - 1.0) / (n + 1.0);
    let variance = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0).powi(2) * (n + 3.0) * (n + 5.0));
    let x = (b2 - expected) / variance.sqrt();
    let sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * ((6.0 * (n + 3.0) * (n + 5.0)) / (n * (n - 2.0) * (n - 3.0))).sqrt();
    let a = 6.0
        + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + (1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)).sqrt());
    let term1 = 1.0 - 2.0 / (9.0 * a);
    let denom = 1.0 + x * (2.0 / (a - 4.0)).sqrt();
    if denom == 0.0 {
        return Err(StatsError::KurtosisUndefined);
    }
    let term2 = denom.signum() * ((1.0 - 2.0 / a) / denom.abs()).cbrt();
    Ok((term1 - term2) / (2.0 / (9.0 * a)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_samples_are_rejected() {
        let sample: Vec<f64> = (0..19).map(f64::from).collect();
        assert_eq!(
            dagostino_k2(&sample),
            Err(StatsError::SampleTooSmall { n: 19 })
        );
    }

    #[test]
    fn constant_sample_is_rejected() {
        let sample = vec![4.2; 25];
        assert_eq!(dagostino_k2(&sample), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn nan_is_rejected() {
        let mut sample = vec![0.5; 25];
        sample[3] = f64::NAN;
        assert_eq!(dagostino_k2(&sample), Err(StatsError::NonFinite));
    }

    #[test]
    fn symmetric_sample_has_zero_skew_component() {
        // A symmetric sample has m3 = 0 exactly, so K² is purely the
        // kurtosis component and the asinh transform contributes nothing.
        let sample: Vec<f64> = (-12..=12).map(f64::from).collect();
        let r = dagostino_k2(&sample).unwrap();
        let zk = kurtosis_z(
            {
                let n = sample.len() as f64;
                let m2 = sample.iter().map(|x| x * x).sum::<f64>() / n;
                let m4 = sample.iter().map(|x| x.powi(4)).sum::<f64>() / n;
                m4 / (m2 * m2)
            },
            sample.len() as f64,
        )
        .unwrap();
        assert!((r.statistic - zk * zk).abs() < 1e-12);
    }
}
