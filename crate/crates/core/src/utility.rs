//! Cumulative utility over time spent in each state.
//!
//! A fixed score `s_k` per state (state 0 scores zero) gives
//! `U(tau) = Σ_k s_k · |{t <= tau : Y(t) = k}|`. With `s_k = k` this is the
//! ordinal-score burden; the comparative utility `1{Y_other(t) < k}` is the
//! per-pair win time and is exercised through
//! [`crate::rmtif::rmtif_pairwise_oracle`].

use serde::{Deserialize, Serialize};

use crate::data::ArmDataset;
use crate::error::{Error, Result};
use crate::km::rmst;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UtilitySpec {
    FixedScores { scores: Vec<f64> },
    Comparative,
}

impl UtilitySpec {
    pub fn fixed(scores: Vec<f64>) -> Result<Self> {
        check_scores(&scores)?;
        Ok(Self::FixedScores { scores })
    }

    /// Scores `1, 2, ..., n_transitions`.
    pub fn consecutive(n_transitions: usize) -> Self {
        Self::FixedScores {
            scores: (1..=n_transitions).map(|k| k as f64).collect(),
        }
    }

    fn scores(&self) -> Result<&[f64]> {
        match self {
            UtilitySpec::FixedScores { scores } => {
                check_scores(scores)?;
                Ok(scores)
            }
            UtilitySpec::Comparative => Err(Error::Config(
                "comparative utilities depend on the counterpart process; use the pairwise win-time oracle".into(),
            )),
        }
    }
}

fn check_scores(scores: &[f64]) -> Result<()> {
    let ok = scores.iter().all(|s| s.is_finite() && *s >= 0.0) && scores.windows(2).all(|w| w[0] <= w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::NonMonotoneScores)
    }
}

/// Utility of one complete trajectory given its transition times.
pub fn cumulative_utility(transition_times: &[f64], events: &[bool], spec: &UtilitySpec, tau: f64) -> Result<f64> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::NonPositiveHorizon(tau));
    }
    if events.iter().any(|&e| !e) {
        return Err(Error::CensoredInput);
    }
    let scores = spec.scores()?;
    if scores.len() != transition_times.len() {
        return Err(Error::Config(format!(
            "{} scores for {} transitions",
            scores.len(),
            transition_times.len()
        )));
    }
    let m = transition_times.len();
    let mut total = 0.0;
    for k in 0..m {
        let enter = transition_times[k].min(tau);
        let leave = transition_times.get(k + 1).map_or(tau, |&t| t.min(tau));
        total += scores[k] * (leave - enter);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityContrast {
    pub tau: f64,
    pub scores: Vec<f64>,
    pub treated: f64,
    pub control: f64,
    /// Treated minus control, in score × time units.
    pub difference: f64,
}

/// `Ê{U} = Σ_k (s_k - s_{k-1}) (tau - RMST_k)` per arm.
pub fn expected_utility(data: &ArmDataset, spec: &UtilitySpec, tau: f64) -> Result<f64> {
    let scores = spec.scores()?;
    if scores.len() != data.n_transitions() {
        return Err(Error::Config(format!(
            "{} scores for {} transitions",
            scores.len(),
            data.n_transitions()
        )));
    }
    let curves = crate::auc::ArmCurves::fit(data)?;
    let mut prev = 0.0;
    let mut total = 0.0;
    for (s, km) in scores.iter().zip(&curves.survival) {
        total += (s - prev) * (tau - rmst(km, tau)?);
        prev = *s;
    }
    Ok(total)
}

pub fn expected_utility_contrast(
    treated: &ArmDataset,
    control: &ArmDataset,
    spec: &UtilitySpec,
    tau: f64,
) -> Result<UtilityContrast> {
    if treated.state_space() != control.state_space() {
        return Err(Error::StateSpaceMismatch);
    }
    let u1 = expected_utility(treated, spec, tau)?;
    let u0 = expected_utility(control, spec, tau)?;
    Ok(UtilityContrast {
        tau,
        scores: spec.scores()?.to_vec(),
        treated: u1,
        control: u0,
        difference: u1 - u0,
    })
}
