//! Restricted mean time in favor of treatment (RMT-IF).
//!
//! With independent treated and control processes, the net time the treated
//! process spends in a strictly better state splits by the state `k` held by
//! the losing process:
//!
//! `μ_k = ∫_0^tau P(Y1 < k, Y0 = k) - P(Y0 < k, Y1 = k) dt`
//!     `= ∫_0^tau S1_k S0_{k+1} - S0_k S1_{k+1} dt`, with `S_{K+2} ≡ 1`,
//!
//! so the death stage is the RMST difference of the death transition. The
//! plug-in uses per-transition Kaplan-Meier curves of each arm.

use serde::{Deserialize, Serialize};

use crate::data::ArmDataset;
use crate::error::{Error, Result};
use crate::inference::{check_alpha, quantile, sample_sd, Wald};
use crate::km::{fit_km, rmst, TransitionSample};
use crate::resample::bootstrap_two_arm;
use crate::step::{union_jump_times, StepCurve};

pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmtifEstimate {
    pub tau: f64,
    pub overall: f64,
    /// One entry per transition; the last is the death (RMST) stage.
    pub stages: Vec<f64>,
}

fn check_inputs(treated: &ArmDataset, control: &ArmDataset, tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::NonPositiveHorizon(tau));
    }
    if treated.state_space() != control.state_space() {
        return Err(Error::StateSpaceMismatch);
    }
    Ok(())
}

fn km_all(data: &ArmDataset) -> Result<Vec<StepCurve>> {
    (0..data.n_transitions())
        .map(|k| fit_km(&TransitionSample::from_dataset(data, k)))
        .collect()
}

/// `∫_0^tau a(t)·b(t) - c(t)·d(t) dt` over the union of the four jump sets.
fn cross_integral(a: &StepCurve, b: &StepCurve, c: &StepCurve, d: &StepCurve, tau: f64) -> f64 {
    let grid = union_jump_times(&[a, b, c, d], tau);
    let f = |t: f64| a.eval(t) * b.eval(t) - c.eval(t) * d.eval(t);
    let mut area = 0.0;
    let mut left = 0.0;
    let mut current = f(0.0);
    for t in grid {
        area += current * (t - left);
        left = t;
        current = f(t);
    }
    area + current * (tau - left)
}

fn estimate_from_curves(s1: &[StepCurve], s0: &[StepCurve], tau: f64) -> Result<RmtifEstimate> {
    let m = s1.len();
    let mut stages = Vec::with_capacity(m);
    for k in 0..m - 1 {
        stages.push(cross_integral(&s1[k], &s0[k + 1], &s0[k], &s1[k + 1], tau));
    }
    stages.push(rmst(&s1[m - 1], tau)? - rmst(&s0[m - 1], tau)?);
    Ok(RmtifEstimate {
        tau,
        overall: stages.iter().sum(),
        stages,
    })
}

/// KM plug-in estimate of the overall RMT-IF and its stage decomposition.
pub fn rmtif_estimate(treated: &ArmDataset, control: &ArmDataset, tau: f64) -> Result<RmtifEstimate> {
    check_inputs(treated, control, tau)?;
    estimate_from_curves(&km_all(treated)?, &km_all(control)?, tau)
}

/// Piecewise-constant state path of one complete trajectory: breakpoints
/// are the transition times, the state after `times[j]` counts all
/// transitions at or before it.
fn state_at(times: &[f64], t: f64) -> usize {
    times.partition_point(|&s| s <= t)
}

/// Signed win time of `a` over `b` on `[0, tau]`, split by the state held
/// by the losing process. Positive entries favor `a`.
pub fn pair_win_time(a: &[f64], b: &[f64], tau: f64, stages: &mut [f64]) {
    let mut grid: Vec<f64> = a.iter().chain(b).copied().filter(|&t| t < tau).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut left = 0.0;
    let mut sa = state_at(a, 0.0);
    let mut sb = state_at(b, 0.0);
    for t in grid.into_iter().chain(std::iter::once(tau)) {
        let len = t - left;
        if len > 0.0 {
            if sa < sb {
                stages[sb - 1] += len;
            } else if sb < sa {
                stages[sa - 1] -= len;
            }
        }
        left = t;
        sa = state_at(a, t);
        sb = state_at(b, t);
    }
}

/// Exact average of signed pairwise win times over all treated/control
/// pairs. Requires complete (uncensored) data.
pub fn rmtif_pairwise_oracle(treated: &ArmDataset, control: &ArmDataset, tau: f64) -> Result<RmtifEstimate> {
    check_inputs(treated, control, tau)?;
    let complete = |d: &ArmDataset| d.subjects().iter().all(|s| s.events.iter().all(|&e| e));
    if !complete(treated) || !complete(control) {
        return Err(Error::CensoredInput);
    }
    let m = treated.n_transitions();
    let mut totals = vec![0.0; m];
    let mut pair = vec![0.0; m];
    for a in treated.subjects() {
        for b in control.subjects() {
            pair.iter_mut().for_each(|v| *v = 0.0);
            pair_win_time(&a.times, &b.times, tau, &mut pair);
            for (t, p) in totals.iter_mut().zip(&pair) {
                *t += p;
            }
        }
    }
    let n_pairs = (treated.len() * control.len()) as f64;
    let stages: Vec<f64> = totals.into_iter().map(|t| t / n_pairs).collect();
    Ok(RmtifEstimate {
        tau,
        overall: stages.iter().sum(),
        stages,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    #[default]
    Normal,
    Percentile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub ci: CiMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmtifReport {
    pub tau: f64,
    pub alpha: f64,
    pub labels: Vec<String>,
    pub overall: Wald,
    pub stages: Vec<Wald>,
    pub replicates: usize,
    pub seed: u64,
    pub ci_method: CiMethod,
}

/// Point estimates with bootstrap standard errors (subjects resampled
/// within each arm), normal or percentile CIs and Wald p-values.
pub fn rmtif_infer(
    treated: &ArmDataset,
    control: &ArmDataset,
    tau: f64,
    boot: BootstrapConfig,
    alpha: f64,
) -> Result<RmtifReport> {
    check_alpha(alpha)?;
    if boot.replicates < MIN_REPLICATES {
        return Err(Error::TooFewReplicates {
            min: MIN_REPLICATES,
            got: boot.replicates,
        });
    }
    let point = rmtif_estimate(treated, control, tau)?;
    let reps = bootstrap_two_arm(treated, control, boot.replicates, boot.seed, |t, c| {
        rmtif_estimate(t, c, tau)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let summarize = |estimate: f64, draws: Vec<f64>| -> Result<Wald> {
        let se = sample_sd(&draws);
        let mut w = Wald::new(estimate, se, alpha)?;
        if boot.ci == CiMethod::Percentile {
            let mut sorted = draws;
            sorted.sort_by(f64::total_cmp);
            w.lower = quantile(&sorted, alpha / 2.0);
            w.upper = quantile(&sorted, 1.0 - alpha / 2.0);
        }
        Ok(w)
    };
    let overall = summarize(point.overall, reps.iter().map(|r| r.overall).collect())?;
    let stages = (0..point.stages.len())
        .map(|k| summarize(point.stages[k], reps.iter().map(|r| r.stages[k]).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RmtifReport {
        tau,
        alpha,
        labels: treated.state_space().labels().to_vec(),
        overall,
        stages,
        replicates: boot.replicates,
        seed: boot.seed,
        ci_method: boot.ci,
    })
}
