//! Small statistical helpers shared by the experiment harness and tests.

use super::NumericsError;

/// Arithmetic mean; 0 for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation (normalized by N, not N-1).
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Nearest-rank percentile: the smallest value whose rank is at least
/// `ceil(p * N)`. `p` must lie in (0, 1].
pub fn percentile_nearest_rank(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty slice");
    assert!(p > 0.0 && p <= 1.0, "percentile level must lie in (0, 1]");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Median via the nearest-rank convention.
pub fn median(values: &[f64]) -> f64 {
    percentile_nearest_rank(values, 0.5)
}

/// Sample autocorrelation at a lag: the Pearson correlation between the
/// sequence and its lagged copy. Exactly 1 at lag 0; an alternating
/// sequence gives exactly -1 at lag 1.
///
/// Returns `DegenerateSequence` when either window has zero variance (or is
/// too short for the lag), where the correlation is undefined.
pub fn lag_autocorrelation(sequence: &[f64], lag: usize) -> Result<f64, NumericsError> {
    let t_len = sequence.len();
    if lag + 2 > t_len {
        return Err(NumericsError::DegenerateSequence);
    }
    let head = &sequence[..t_len - lag];
    let tail = &sequence[lag..];
    let mh = mean(head);
    let mt = mean(tail);
    let mut cov = 0.0f64;
    let mut var_h = 0.0f64;
    let mut var_t = 0.0f64;
    for (x, y) in head.iter().zip(tail) {
        cov += (x - mh) * (y - mt);
        var_h += (x - mh) * (x - mh);
        var_t += (y - mt) * (y - mt);
    }
    if var_h <= 0.0 || var_t <= 0.0 {
        return Err(NumericsError::DegenerateSequence);
    }
    Ok(cov / (var_h * var_t).sqrt())
}
