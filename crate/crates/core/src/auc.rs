//! Cumulative ordinal-score burden (AUC) per arm and between arms.
//!
//! The mean score at time `t` is `(K+1) - Σ_k S_k(t)` and the burden up to
//! `tau` is `(K+1)·tau - Σ_k RMST_k(tau)`, each `S_k` being the Kaplan-Meier
//! curve of transition `k`. Standard errors come from the martingale
//! influence-function expansion of the KM-based RMSTs, summed over
//! transitions per subject so that within-subject correlation is kept.

use serde::Serialize;

use crate::data::ArmDataset;
use crate::error::{Error, Result};
use crate::inference::{check_alpha, Wald};
use crate::km::{fit_nelson_aalen, rmst, HazardIncrements, TransitionSample};
use crate::step::{union_jump_times, StepCurve};

/// KM curves and hazard increments for every transition of one arm.
#[derive(Debug, Clone)]
pub struct ArmCurves {
    pub samples: Vec<TransitionSample>,
    pub hazards: Vec<HazardIncrements>,
    pub survival: Vec<StepCurve>,
}

impl ArmCurves {
    pub fn fit(data: &ArmDataset) -> Result<Self> {
        let m = data.n_transitions();
        let mut samples = Vec::with_capacity(m);
        let mut hazards = Vec::with_capacity(m);
        let mut survival = Vec::with_capacity(m);
        for k in 0..m {
            let sample = TransitionSample::from_dataset(data, k);
            let h = fit_nelson_aalen(&sample)?;
            survival.push(h.product_limit());
            hazards.push(h);
            samples.push(sample);
        }
        Ok(Self {
            samples,
            hazards,
            survival,
        })
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveHorizon(tau))
    }
}

fn tail_warning(data: &ArmDataset, tau: f64) -> Option<String> {
    let max = data.max_time();
    (tau > max).then(|| {
        format!(
            "tau = {tau} exceeds the largest observed time {max} in the {} arm; KM tails carried forward",
            data.arm().name()
        )
    })
}

fn score_curve_from(survival: &[StepCurve], tau: f64) -> StepCurve {
    let refs: Vec<&StepCurve> = survival.iter().collect();
    let times = union_jump_times(&refs, tau);
    let top = survival.len() as f64;
    let score_at = |t: f64| top - survival.iter().map(|s| s.eval(t)).sum::<f64>();
    let values = times.iter().map(|&t| score_at(t)).collect();
    StepCurve::from_parts(score_at(0.0), times, values)
}

/// Mean cumulative score curve on `[0, tau]`.
pub fn mean_score_curve(data: &ArmDataset, tau: f64) -> Result<StepCurve> {
    check_tau(tau)?;
    let curves = ArmCurves::fit(data)?;
    Ok(score_curve_from(&curves.survival, tau))
}

/// Subject-level burden `A(tau) = (K+1)·tau - Σ_k min(T_k, tau)`.
pub fn subject_burden(transition_times: &[f64], tau: f64) -> f64 {
    let m = transition_times.len() as f64;
    m * tau - transition_times.iter().map(|&t| t.min(tau)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AucArmEstimate {
    pub tau: f64,
    pub auc: f64,
    pub rmst_components: Vec<f64>,
    pub se: f64,
    pub n: usize,
    pub warnings: Vec<String>,
}

/// Per-subject influence values of the burden estimate.
///
/// For each transition the martingale integral reduces to a finite sum over
/// KM jump times `u <= tau`:
/// `ξ_i = Σ_k [ δ_ik w_k(X_ik) - Σ_{u_j <= X_ik} w_k(u_j) dΛ_k(u_j) ]`,
/// with `w_k(u) = ∫_u^tau S_k / P̂(X_k >= u)`.
pub fn auc_influence(data: &ArmDataset, tau: f64) -> Result<Vec<f64>> {
    check_tau(tau)?;
    let curves = ArmCurves::fit(data)?;
    Ok(influence_from(&curves, tau))
}

fn influence_from(curves: &ArmCurves, tau: f64) -> Vec<f64> {
    let n = curves.samples.first().map_or(0, |s| s.len());
    let mut xi = vec![0.0; n];
    for ((sample, hazard), surv) in curves.samples.iter().zip(&curves.hazards).zip(&curves.survival) {
        let (cum_areas, total) = surv.cumulative_areas(tau);
        let n_jumps = cum_areas.len();
        let weights: Vec<f64> = (0..n_jumps)
            .map(|j| (total - cum_areas[j]) * n as f64 / hazard.at_risk[j] as f64)
            .collect();
        let mut compensator = Vec::with_capacity(n_jumps);
        let mut acc = 0.0;
        for (w, dl) in weights.iter().zip(&hazard.increments) {
            acc += w * dl;
            compensator.push(acc);
        }
        let jumps = &hazard.jump_times[..n_jumps];
        for (i, (&x, &d)) in sample.times().iter().zip(sample.events()).enumerate() {
            let upto = jumps.partition_point(|&u| u <= x);
            let mut v = if upto > 0 { -compensator[upto - 1] } else { 0.0 };
            if d && x <= tau {
                v += weights[upto - 1];
            }
            xi[i] += v;
        }
    }
    xi
}

fn se_from_influence(xi: &[f64]) -> Result<f64> {
    let n = xi.len() as f64;
    let mean_sq = xi.iter().map(|v| v * v).sum::<f64>() / n;
    let se = (mean_sq / n).sqrt();
    if se.is_finite() {
        Ok(se)
    } else {
        Err(Error::DegenerateVariance)
    }
}

/// Influence-function standard error of the arm's burden estimate.
pub fn auc_influence_se(data: &ArmDataset, tau: f64) -> Result<f64> {
    se_from_influence(&auc_influence(data, tau)?)
}

/// Burden point estimate, RMST components and influence-function SE.
pub fn auc_arm(data: &ArmDataset, tau: f64) -> Result<AucArmEstimate> {
    check_tau(tau)?;
    let curves = ArmCurves::fit(data)?;
    let est = auc_from_curves(&curves, data.len(), tau)?;
    debug_assert!({
        let by_curve = score_curve_from(&curves.survival, tau).area_to(tau);
        (by_curve - est.auc).abs() <= 1e-9 * (1.0 + est.auc.abs())
    });
    let mut est = est;
    est.se = se_from_influence(&influence_from(&curves, tau))?;
    est.warnings.extend(tail_warning(data, tau));
    Ok(est)
}

/// Point estimate only (no SE); used inside resampling loops.
pub fn auc_point(data: &ArmDataset, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let curves = ArmCurves::fit(data)?;
    Ok(auc_from_curves(&curves, data.len(), tau)?.auc)
}

fn auc_from_curves(curves: &ArmCurves, n: usize, tau: f64) -> Result<AucArmEstimate> {
    let rmst_components = curves
        .survival
        .iter()
        .map(|s| rmst(s, tau))
        .collect::<Result<Vec<_>>>()?;
    let m = rmst_components.len() as f64;
    let auc = m * tau - rmst_components.iter().sum::<f64>();
    Ok(AucArmEstimate {
        tau,
        auc,
        rmst_components,
        se: 0.0,
        n,
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioInference {
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub p_value: f64,
    /// Inference on `log R` (delta method).
    pub log_ratio: Wald,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AucContrast {
    pub tau: f64,
    pub alpha: f64,
    pub labels: Vec<String>,
    pub treated: AucArmEstimate,
    pub control: AucArmEstimate,
    /// `auc_treated - auc_control` with `se = sqrt(se1² + se0²)`.
    pub difference: Wald,
    /// `None` when either arm has zero burden.
    pub ratio: Option<RatioInference>,
    /// Treated minus control RMST per transition (time free of each event).
    pub component_differences: Vec<f64>,
    pub warnings: Vec<String>,
}

pub fn auc_contrast(treated: &ArmDataset, control: &ArmDataset, tau: f64, alpha: f64) -> Result<AucContrast> {
    check_alpha(alpha)?;
    if treated.state_space() != control.state_space() {
        return Err(Error::StateSpaceMismatch);
    }
    let a1 = auc_arm(treated, tau)?;
    let a0 = auc_arm(control, tau)?;
    let diff_se = (a1.se * a1.se + a0.se * a0.se).sqrt();
    let difference = Wald::new(a1.auc - a0.auc, diff_se, alpha)?;
    let mut warnings: Vec<String> = a1.warnings.iter().chain(&a0.warnings).cloned().collect();
    let ratio = if a0.auc > 0.0 && a1.auc > 0.0 {
        let log_se = ((a1.se / a1.auc).powi(2) + (a0.se / a0.auc).powi(2)).sqrt();
        let log_ratio = Wald::new((a1.auc / a0.auc).ln(), log_se, alpha)?;
        Some(RatioInference {
            ratio: a1.auc / a0.auc,
            lower: log_ratio.lower.exp(),
            upper: log_ratio.upper.exp(),
            p_value: log_ratio.p_value,
            log_ratio,
        })
    } else {
        warnings.push(if a0.auc <= 0.0 {
            Error::ZeroControlBurden.to_string()
        } else {
            "treated arm burden is zero; ratio inference undefined".to_string()
        });
        None
    };
    let component_differences = a1
        .rmst_components
        .iter()
        .zip(&a0.rmst_components)
        .map(|(r1, r0)| r1 - r0)
        .collect();
    Ok(AucContrast {
        tau,
        alpha,
        labels: treated.state_space().labels().to_vec(),
        treated: a1,
        control: a0,
        difference,
        ratio,
        component_differences,
        warnings,
    })
}

/// `(t, AUC_treated(t) / AUC_control(t))` at each jump of either score
/// curve, where both running areas are positive.
pub fn running_auc_ratio(treated: &StepCurve, control: &StepCurve, tau: f64) -> Vec<(f64, f64)> {
    let mut grid = union_jump_times(&[treated, control], tau);
    if grid.last().is_none_or(|&t| t < tau) {
        grid.push(tau);
    }
    grid.into_iter()
        .filter_map(|t| {
            let a1 = treated.area_to(t);
            let a0 = control.area_to(t);
            (a1 > 0.0 && a0 > 0.0).then(|| (t, a1 / a0))
        })
        .collect()
}
