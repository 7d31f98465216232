//! Empirical summaries over delay and gap samples.

/// Linear-interpolation quantile (R type 7) of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() || !(0.0..=1.0).contains(&p) {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Quantile of an unsorted sample; sorts a copy.
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, p)
}

/// Fraction of samples strictly greater than `x`.
pub fn survival_sorted(sorted: &[f64], x: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let at_or_below = sorted.partition_point(|&v| v <= x);
    (sorted.len() - at_or_below) as f64 / sorted.len() as f64
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), Some(1.0));
        assert_eq!(quantile_sorted(&v, 1.0), Some(4.0));
        assert!((quantile_sorted(&v, 0.5).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(quantile_sorted(&[], 0.5), None);
    }

    #[test]
    fn survival_counts_strictly_greater() {
        let v = [1.0, 2.0, 2.0, 3.0];
        assert_eq!(survival_sorted(&v, 2.0), 0.25);
        assert_eq!(survival_sorted(&v, 0.0), 1.0);
        assert_eq!(survival_sorted(&v, 3.0), 0.0);
    }
}
