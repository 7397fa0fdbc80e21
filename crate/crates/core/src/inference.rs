//! Normal-approximation intervals and two-sided Wald p-values.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Upper `1 - alpha/2` standard normal quantile.
pub fn z_critical(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(std_normal().inverse_cdf(1.0 - alpha / 2.0))
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Two-sided p-value for `estimate / se` against a standard normal.
/// A zero SE gives `p = 1` for a zero estimate and `p = 0` otherwise.
pub fn two_sided_p(estimate: f64, se: f64) -> f64 {
    if se > 0.0 {
        let z = (estimate / se).abs();
        2.0 * std_normal().sf(z)
    } else if estimate == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Point estimate with standard error, normal CI and two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Wald {
    pub estimate: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub p_value: f64,
}

impl Wald {
    pub fn new(estimate: f64, se: f64, alpha: f64) -> Result<Self> {
        let z = z_critical(alpha)?;
        Ok(Self {
            estimate,
            se,
            lower: estimate - z * se,
            upper: estimate + z * se,
            p_value: two_sided_p(estimate, se),
        })
    }

    pub fn covers(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Linear-interpolated quantile (type 7).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_for_95() {
        assert!((z_critical(0.05).unwrap() - 1.959963984540054).abs() < 1e-9);
        assert!(z_critical(0.0).is_err());
        assert!(z_critical(1.0).is_err());
    }

    #[test]
    fn p_values() {
        assert!((two_sided_p(1.959963984540054, 1.0) - 0.05).abs() < 1e-9);
        assert_eq!(two_sided_p(0.0, 0.0), 1.0);
        assert_eq!(two_sided_p(0.3, 0.0), 0.0);
        assert_eq!(two_sided_p(0.0, 2.0), 1.0);
    }

    #[test]
    fn sd_and_quantile() {
        assert!((sample_sd(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.25), 1.25);
    }
}
