//! Order statistics and moments shared by calibration and evaluation.
//!
//! Percentiles use linear interpolation between order statistics: for
//! probability `p` over `n` sorted values the rank is `h = (n - 1) p` and the
//! result interpolates between `x[floor(h)]` and `x[floor(h) + 1]`.

use alloc::vec::Vec;

/// Sorted copy of `values` (NaNs last).
pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Quantile of already-sorted data at probability `p` in `[0, 1]`.
///
/// Panics if `sorted` is empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = libm::floor(h) as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Percentile (`pct` in `[0, 100]`) of unsorted data. `None` when empty.
pub fn percentile(values: &[f64], pct: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(quantile_sorted(&sorted(values), pct / 100.0))
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

/// Population standard deviation.
pub fn std_dev(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    Some(libm::sqrt(var))
}

/// Pearson correlation. `None` if lengths differ, fewer than two samples, or
/// either series is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let ma = mean(a)?;
    let mb = mean(b)?;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (da, db) = (x - ma, y - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn quartiles_of_zero_to_ninety_nine() {
        let v: Vec<f64> = (0..100).map(f64::from).collect();
        assert_eq!(quantile_sorted(&v, 0.25), 24.75);
        assert_eq!(quantile_sorted(&v, 0.5), 49.5);
        assert_eq!(quantile_sorted(&v, 0.75), 74.25);
        assert_eq!(quantile_sorted(&v, 0.0), 0.0);
        assert_eq!(quantile_sorted(&v, 1.0), 99.0);
    }

    #[test]
    fn percentile_single_value() {
        assert_eq!(percentile(&[3.0], 95.0), Some(3.0));
        assert_eq!(percentile(&[], 95.0), None);
    }

    #[test]
    fn pearson_of_linear_map() {
        let a = vec![1.0, 2.0, 4.0, 8.0];
        let b: Vec<f64> = a.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((pearson(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let c: Vec<f64> = a.iter().map(|x| -x).collect();
        assert!((pearson(&a, &c).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&a, &[1.0; 4]), None);
    }

    #[test]
    fn std_dev_population() {
        assert_eq!(std_dev(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]), Some(2.0));
    }
}
