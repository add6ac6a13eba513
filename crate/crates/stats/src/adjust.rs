//! Multiple-comparison adjustments over a family of p-values.

use crate::StatsError;

fn validate(p_values: &[f64]) -> Result<(), StatsError> {
    for &p in p_values {
        if !(0.0..=1.0).contains(&p) {
            return Err(StatsError::PValueOutOfRange { value: p });
        }
    }
    Ok(())
}

/// Benjamini–Hochberg step-up adjustment. Returns adjusted p-values in
/// input order: sort ascending, scale p₍ᵢ₎ by m/i, then enforce
/// monotonicity with a running minimum from the largest rank down.
pub fn bh_adjust(p_values: &[f64]) -> Result<Vec<f64>, StatsError> {
    validate(p_values)?;
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_unstable_by(|&i, &j| p_values[i].partial_cmp(&p_values[j]).unwrap());

    let mut adjusted = vec![0.0; m];
    let mut running_min = 1.0f64;
    for (pos, &orig) in order.iter().enumerate().rev() {
        // m/rank first: the factor is exactly 1.0 at the top rank, so a
        // family of equal p-values passes through unchanged.
        let scaled = p_values[orig] * (m as f64 / (pos + 1) as f64);
        running_min = running_min.min(scaled.min(1.0));
        adjusted[orig] = running_min;
    }
    Ok(adjusted)
}

/// Bonferroni adjustment: multiply by the family size and clip to 1.
pub fn bonferroni_adjust(p_values: &[f64]) -> Result<Vec<f64>, StatsError> {
    validate(p_values)?;
    let m = p_values.len() as f64;
    Ok(p_values.iter().map(|&p| (p * m).min(1.0)).collect())
}
