//! Midrank assignment with tie handling, shared by both rank tests.

use crate::StatsError;

/// Assign 1-based ranks to `values`, giving tied values the mean of the
/// ranks they span (midranks). Returns ranks in input order.
pub fn rank_with_ties(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    Ok(ranks_and_tie_term(values)?.0)
}

/// Ranks plus the tie-correction term Σ(t³ − t) over tie groups of size t,
/// used by the variance corrections of both rank tests.
pub(crate) fn ranks_and_tie_term(values: &[f64]) -> Result<(Vec<f64>, f64), StatsError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    // Finite check above makes the comparison total.
    order.sort_unstable_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());

    let mut ranks = vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        // Positions start..=end share the midrank of that span.
        let midrank = (start + end) as f64 / 2.0 + 1.0;
        for &orig in &order[start..=end] {
            ranks[orig] = midrank;
        }
        let t = (end - start + 1) as f64;
        tie_term += t * t * t - t;
        start = end + 1;
    }
    Ok((ranks, tie_term))
}
