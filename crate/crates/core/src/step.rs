//! Right-continuous piecewise-constant curves on `[0, ∞)`.
//!
//! Kaplan-Meier survival, Nelson-Aalen cumulative hazard and mean score
//! curves are all stored as a [`StepCurve`]. Areas are computed exactly as
//! rectangle sums.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCurve {
    initial_value: f64,
    jump_times: Vec<f64>,
    values: Vec<f64>,
}

impl StepCurve {
    pub fn new(initial_value: f64, jump_times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if jump_times.len() != values.len() {
            return Err(Error::InvalidCurve(format!(
                "{} jump times but {} values",
                jump_times.len(),
                values.len()
            )));
        }
        if !initial_value.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite value".into()));
        }
        if jump_times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidCurve("jump times must be finite and >= 0".into()));
        }
        if jump_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve("jump times must be strictly increasing".into()));
        }
        Ok(Self {
            initial_value,
            jump_times,
            values,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            initial_value: value,
            jump_times: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from validated parts; callers guarantee ordering.
    pub(crate) fn from_parts(initial_value: f64, jump_times: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(jump_times.len(), values.len());
        debug_assert!(jump_times.windows(2).all(|w| w[0] < w[1]));
        Self {
            initial_value,
            jump_times,
            values,
        }
    }

    pub fn initial_value(&self) -> f64 {
        self.initial_value
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.jump_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jump_times.is_empty()
    }

    /// Value at `t`: the value attached to the last jump at or before `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&s| s <= t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// Value just before `t` (left limit).
    pub fn eval_left(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&s| s < t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// Exact area under the curve on `[a, b]`. Returns 0 when `b <= a`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut area = 0.0;
        let mut left = a;
        let mut current = self.eval(a);
        let start = self.jump_times.partition_point(|&s| s <= a);
        for (&t, &v) in self.jump_times[start..].iter().zip(&self.values[start..]) {
            if t >= b {
                break;
            }
            area += current * (t - left);
            left = t;
            current = v;
        }
        area + current * (b - left)
    }

    /// Area on `[0, tau]`.
    pub fn area_to(&self, tau: f64) -> f64 {
        self.integral(0.0, tau)
    }

    /// Cumulative areas `∫_0^{t_j} f` at each jump time `t_j` up to `tau`,
    /// together with the total on `[0, tau]`. Used to get many tail areas
    /// `∫_u^tau f = total - cumulative(u)` in one pass.
    pub(crate) fn cumulative_areas(&self, tau: f64) -> (Vec<f64>, f64) {
        let mut out = Vec::with_capacity(self.jump_times.len());
        let mut area = 0.0;
        let mut left = 0.0;
        let mut current = self.initial_value;
        for (&t, &v) in self.jump_times.iter().zip(&self.values) {
            if t > tau {
                break;
            }
            area += current * (t - left);
            out.push(area);
            left = t;
            current = v;
        }
        let total = if tau > left {
            area + current * (tau - left)
        } else {
            area
        };
        (out, total)
    }

    /// Curve restricted to `[0, tau]`: jumps after `tau` are dropped.
    pub fn truncate(&self, tau: f64) -> Self {
        let end = self.jump_times.partition_point(|&s| s <= tau);
        Self::from_parts(
            self.initial_value,
            self.jump_times[..end].to_vec(),
            self.values[..end].to_vec(),
        )
    }

    /// `(time, value)` pairs starting with `(0, initial_value)`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.jump_times.len() + 1);
        if self.jump_times.first().is_none_or(|&t| t > 0.0) {
            pts.push((0.0, self.initial_value));
        }
        pts.extend(self.jump_times.iter().copied().zip(self.values.iter().copied()));
        pts
    }
}

/// Sorted union of the jump times of several curves, keeping those `<= tau`.
pub fn union_jump_times(curves: &[&StepCurve], tau: f64) -> Vec<f64> {
    let mut all: Vec<f64> = curves
        .iter()
        .flat_map(|c| c.jump_times().iter().copied())
        .filter(|&t| t <= tau)
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn km_example() -> StepCurve {
        StepCurve::new(1.0, vec![1.0, 3.0], vec![2.0 / 3.0, 0.0]).unwrap()
    }

    #[test]
    fn eval_is_right_continuous() {
        let c = km_example();
        assert_eq!(c.eval(0.0), 1.0);
        assert_eq!(c.eval(0.999), 1.0);
        assert_eq!(c.eval(1.0), 2.0 / 3.0);
        assert_eq!(c.eval(2.9), 2.0 / 3.0);
        assert_eq!(c.eval(3.0), 0.0);
        assert_eq!(c.eval(100.0), 0.0);
        assert_eq!(c.eval_left(1.0), 1.0);
        assert_eq!(c.eval_left(3.0), 2.0 / 3.0);
    }

    #[test]
    fn integral_rectangles() {
        let c = km_example();
        assert!((c.area_to(3.0) - (1.0 + 4.0 / 3.0)).abs() < 1e-15);
        assert!((c.integral(0.5, 2.0) - (0.5 + 2.0 / 3.0)).abs() < 1e-15);
        assert_eq!(c.integral(2.0, 2.0), 0.0);
        assert_eq!(c.integral(4.0, 6.0), 0.0);
    }

    #[test]
    fn cumulative_areas_agree_with_integral() {
        let c = km_example();
        let (cum, total) = c.cumulative_areas(2.5);
        assert_eq!(cum, vec![1.0]);
        assert!((total - c.area_to(2.5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_unsorted_jumps() {
        assert!(StepCurve::new(1.0, vec![2.0, 1.0], vec![0.5, 0.2]).is_err());
        assert!(StepCurve::new(1.0, vec![1.0, 1.0], vec![0.5, 0.2]).is_err());
        assert!(StepCurve::new(1.0, vec![1.0], vec![]).is_err());
    }

    #[test]
    fn union_dedups() {
        let a = km_example();
        let b = StepCurve::new(0.0, vec![1.0, 2.0, 7.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(union_jump_times(&[&a, &b], 6.0), vec![1.0, 2.0, 3.0]);
    }
}
