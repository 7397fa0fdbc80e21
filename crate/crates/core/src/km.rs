//! One-sample nonparametric estimators for a single transition.
//!
//! At tied times events are processed before censorings, so a subject
//! censored at `t` is still at risk for events at `t`.

use serde::Serialize;

use crate::data::ArmDataset;
use crate::error::{Error, Result};
use crate::step::StepCurve;

/// Marginal observed times and event indicators for one transition.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSample {
    times: Vec<f64>,
    events: Vec<bool>,
}

impl TransitionSample {
    pub fn new(times: Vec<f64>, events: Vec<bool>) -> Result<Self> {
        if times.len() != events.len() {
            return Err(Error::InvalidCurve(format!(
                "{} times but {} indicators",
                times.len(),
                events.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidCurve("times must be finite and >= 0".into()));
        }
        Ok(Self { times, events })
    }

    /// Transition `k` (zero-based) of every subject in `data`.
    pub fn from_dataset(data: &ArmDataset, k: usize) -> Self {
        let (times, events) = data
            .subjects()
            .iter()
            .map(|s| (s.times[k], s.events[k]))
            .unzip();
        Self { times, events }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn events(&self) -> &[bool] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Distinct event times with event counts and risk-set sizes.
    fn risk_table(&self) -> Vec<(f64, usize, usize)> {
        let mut order: Vec<(f64, bool)> = self.times.iter().copied().zip(self.events.iter().copied()).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = order.len();
        let mut table = Vec::new();
        let mut i = 0;
        while i < n {
            let t = order[i].0;
            let at_risk = n - i;
            let mut j = i;
            let mut d = 0;
            while j < n && order[j].0 == t {
                d += order[j].1 as usize;
                j += 1;
            }
            if d > 0 {
                table.push((t, d, at_risk));
            }
            i = j;
        }
        table
    }
}

/// Nelson-Aalen hazard increments `d_j / Y_j` at each distinct event time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HazardIncrements {
    pub jump_times: Vec<f64>,
    pub increments: Vec<f64>,
    pub events: Vec<usize>,
    pub at_risk: Vec<usize>,
}

impl HazardIncrements {
    pub fn cumulative_hazard(&self) -> StepCurve {
        let mut acc = 0.0;
        let values = self
            .increments
            .iter()
            .map(|&dl| {
                acc += dl;
                acc
            })
            .collect();
        StepCurve::from_parts(0.0, self.jump_times.clone(), values)
    }

    /// Product-limit survival `Π (1 - dΛ)` over the same jumps.
    pub fn product_limit(&self) -> StepCurve {
        let mut s = 1.0;
        let values = self
            .events
            .iter()
            .zip(&self.at_risk)
            .map(|(&d, &y)| {
                s *= 1.0 - d as f64 / y as f64;
                s
            })
            .collect();
        StepCurve::from_parts(1.0, self.jump_times.clone(), values)
    }
}

pub fn fit_nelson_aalen(sample: &TransitionSample) -> Result<HazardIncrements> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let table = sample.risk_table();
    Ok(HazardIncrements {
        jump_times: table.iter().map(|r| r.0).collect(),
        increments: table.iter().map(|r| r.1 as f64 / r.2 as f64).collect(),
        events: table.iter().map(|r| r.1).collect(),
        at_risk: table.iter().map(|r| r.2).collect(),
    })
}

/// Kaplan-Meier product-limit survival curve.
pub fn fit_km(sample: &TransitionSample) -> Result<StepCurve> {
    Ok(fit_nelson_aalen(sample)?.product_limit())
}

/// Restricted mean: exact area under `curve` on `[0, tau]`.
pub fn rmst(curve: &StepCurve, tau: f64) -> Result<f64> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::NonPositiveHorizon(tau));
    }
    Ok(curve.area_to(tau))
}

/// Fraction of subjects with `X > t`.
pub fn at_risk_fraction(sample: &TransitionSample, t: f64) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    sample.times.iter().filter(|&&x| x > t).count() as f64 / sample.len() as f64
}

/// Fraction of subjects with `X >= t` (left-limit at-risk fraction).
pub fn at_risk_fraction_left(sample: &TransitionSample, t: f64) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    sample.times.iter().filter(|&&x| x >= t).count() as f64 / sample.len() as f64
}
