//! Small statistics helpers.

use crate::error::{Error, Result};

/// Upper bound on `Pr(mu_hat_1 <= mu_hat_2)` when each of two arms whose
/// means differ by at least `c * theta` is sampled `4 S / theta^2` times:
/// `(1/2)^(c^2 - 1) * exp(-S)`.
///
/// Only used to size tolerances in statistical tests.
pub fn chernoff_comparison_bound(s: f64, c: u32) -> Result<f64> {
    if s.is_nan() || s < 2.0 {
        return Err(Error::domain(format!("S must be at least 2, got {s}")));
    }
    if c < 1 {
        return Err(Error::domain("c must be at least 1"));
    }
    let exponent = f64::from(c) * f64::from(c) - 1.0;
    Ok(0.5f64.powf(exponent) * (-s).exp())
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Median with the midpoint rule for even counts.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Sample standard deviation (n - 1 denominator).
pub fn std_dev(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chernoff_values() {
        // exp(-2) = 0.1353352832...
        let b = chernoff_comparison_bound(2.0, 1).unwrap();
        assert!((b - 0.135335).abs() < 5e-7);
        // exp(-2) / 8 = 0.0169169104...
        let b = chernoff_comparison_bound(2.0, 2).unwrap();
        assert!((b - 0.016917).abs() < 5e-7);
        assert_eq!(chernoff_comparison_bound(5.0, 1).unwrap(), (-5.0f64).exp());
    }

    #[test]
    fn chernoff_domain() {
        assert!(chernoff_comparison_bound(1.9, 1).is_err());
        assert!(chernoff_comparison_bound(2.0, 0).is_err());
        assert!(chernoff_comparison_bound(f64::NAN, 1).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        assert_eq!(mean(&[1.0, 100.0, 1.0]), Some(34.0));
    }
}
