//! Time-to-first-event composite analysis: a Cox model with a single
//! binary treatment indicator, plus the matching log-rank test and
//! Nelson-Aalen curves per arm.

use serde::{Deserialize, Serialize};

use crate::data::{Arm, ArmDataset};
use crate::error::{Error, Result};
use crate::inference::{check_alpha, two_sided_p, z_critical};
use crate::km::{fit_nelson_aalen, TransitionSample};
use crate::step::StepCurve;

const MAX_ITER: usize = 100;
const SCORE_TOL: f64 = 1e-10;
const STEP_TOL: f64 = 1e-12;

/// One row per subject: time to first transition or censoring.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSample {
    pub times: Vec<f64>,
    pub events: Vec<bool>,
    pub treated: Vec<bool>,
}

impl CompositeSample {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn arm_sample(&self, arm: Arm) -> TransitionSample {
        let want = arm == Arm::Treatment;
        let (times, events) = (0..self.len())
            .filter(|&i| self.treated[i] == want)
            .map(|i| (self.times[i], self.events[i]))
            .unzip();
        TransitionSample::new(times, events).expect("validated times")
    }

    pub fn n_events(&self, arm: Arm) -> usize {
        let want = arm == Arm::Treatment;
        (0..self.len()).filter(|&i| self.treated[i] == want && self.events[i]).count()
    }

    /// Same sample with arm labels exchanged.
    pub fn swap_arms(&self) -> Self {
        Self {
            treated: self.treated.iter().map(|t| !t).collect(),
            ..self.clone()
        }
    }
}

/// First-transition composite: `(x_1, δ_1)` per subject, treated rows first.
pub fn to_composite(treated: &ArmDataset, control: &ArmDataset) -> CompositeSample {
    let mut out = CompositeSample {
        times: Vec::with_capacity(treated.len() + control.len()),
        events: Vec::with_capacity(treated.len() + control.len()),
        treated: Vec::with_capacity(treated.len() + control.len()),
    };
    for data in [treated, control] {
        for s in data.subjects() {
            out.times.push(s.times[0]);
            out.events.push(s.events[0]);
            out.treated.push(data.arm() == Arm::Treatment);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ties {
    #[default]
    Efron,
    Breslow,
}

/// Per distinct event time: treated / control at risk and events.
#[derive(Debug, Clone, Copy)]
struct EventTime {
    n1: f64,
    n0: f64,
    d1: usize,
    d0: usize,
}

fn event_table(sample: &CompositeSample) -> Vec<EventTime> {
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&a, &b| sample.times[a].total_cmp(&sample.times[b]));
    let total1 = sample.treated.iter().filter(|&&t| t).count();
    let total0 = sample.len() - total1;
    let (mut gone1, mut gone0) = (0usize, 0usize);
    let mut table = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let t = sample.times[order[i]];
        let mut j = i;
        let (mut d1, mut d0, mut c1, mut c0) = (0, 0, 0, 0);
        while j < order.len() && sample.times[order[j]] == t {
            let r = order[j];
            match (sample.treated[r], sample.events[r]) {
                (true, true) => d1 += 1,
                (false, true) => d0 += 1,
                (true, false) => c1 += 1,
                (false, false) => c0 += 1,
            }
            j += 1;
        }
        if d1 + d0 > 0 {
            table.push(EventTime {
                n1: (total1 - gone1) as f64,
                n0: (total0 - gone0) as f64,
                d1,
                d0,
            });
        }
        gone1 += d1 + c1;
        gone0 += d0 + c0;
        i = j;
    }
    table
}

#[derive(Debug, Clone, Copy)]
struct PartialLik {
    loglik: f64,
    score: f64,
    info: f64,
}

fn partial_likelihood(table: &[EventTime], beta: f64, ties: Ties) -> PartialLik {
    let r = beta.exp();
    let mut out = PartialLik {
        loglik: 0.0,
        score: 0.0,
        info: 0.0,
    };
    for e in table {
        let d = e.d1 + e.d0;
        let s1 = e.n1 * r;
        let s0 = s1 + e.n0;
        let tie1 = e.d1 as f64 * r;
        let tie0 = tie1 + e.d0 as f64;
        out.loglik += e.d1 as f64 * beta;
        out.score += e.d1 as f64;
        for l in 0..d {
            let frac = match ties {
                Ties::Efron => l as f64 / d as f64,
                Ties::Breslow => 0.0,
            };
            let a0 = s0 - frac * tie0;
            let a1 = s1 - frac * tie1;
            let p = a1 / a0;
            out.loglik -= a0.ln();
            out.score -= p;
            out.info += p - p * p;
        }
    }
    out
}

/// Limits of the score as `beta -> +inf` and `-inf`, from counts only.
fn score_limits(table: &[EventTime], ties: Ties) -> (f64, f64) {
    let mut up = 0.0;
    let mut down = 0.0;
    for e in table {
        let d = e.d1 + e.d0;
        up += e.d1 as f64;
        down += e.d1 as f64;
        for l in 0..d {
            let (w1, w0) = match ties {
                Ties::Efron => (
                    e.n1 * d as f64 - (l * e.d1) as f64,
                    e.n0 * d as f64 - (l * e.d0) as f64,
                ),
                Ties::Breslow => (e.n1, e.n0),
            };
            if w1 > 0.0 {
                up -= 1.0;
            }
            if w0 <= 0.0 {
                down -= 1.0;
            }
        }
    }
    (up, down)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoxFit {
    pub beta: f64,
    pub se: f64,
    pub hazard_ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub p_value: f64,
    pub log_likelihood: f64,
    pub log_likelihood_null: f64,
    /// Score `U(beta_hat)`.
    pub score: f64,
    pub iterations: usize,
    pub ties: Ties,
    pub n: usize,
    pub n_events_treated: usize,
    pub n_events_control: usize,
}

pub fn fit_cox_hr(sample: &CompositeSample, alpha: f64) -> Result<CoxFit> {
    fit_cox_hr_with(sample, alpha, Ties::Efron)
}

/// Safeguarded Newton-Raphson on the partial likelihood: a step that does
/// not increase the log-likelihood (or is non-finite) is halved.
pub fn fit_cox_hr_with(sample: &CompositeSample, alpha: f64, ties: Ties) -> Result<CoxFit> {
    check_alpha(alpha)?;
    let e1 = sample.n_events(Arm::Treatment);
    let e0 = sample.n_events(Arm::Control);
    if e1 == 0 {
        return Err(Error::NoEvents("treatment arm".into()));
    }
    if e0 == 0 {
        return Err(Error::NoEvents("control arm".into()));
    }
    let table = event_table(sample);
    let (up, down) = score_limits(&table, ties);
    if up >= 0.0 || down <= 0.0 {
        return Err(Error::MonotoneLikelihood);
    }

    let null = partial_likelihood(&table, 0.0, ties);
    let mut beta = 0.0;
    let mut cur = null;
    let mut iterations = 0;
    loop {
        if cur.score.abs() < SCORE_TOL {
            break;
        }
        if iterations == MAX_ITER {
            return Err(Error::NoConvergence(MAX_ITER));
        }
        iterations += 1;
        let mut step = cur.score / cur.info;
        if !step.is_finite() {
            step = cur.score.signum();
        }
        let next = loop {
            let trial = partial_likelihood(&table, beta + step, ties);
            if trial.loglik.is_finite() && trial.loglik >= cur.loglik - 1e-12 * cur.loglik.abs() {
                break trial;
            }
            step /= 2.0;
            if step.abs() < STEP_TOL {
                break cur;
            }
        };
        beta += step;
        cur = next;
        if step.abs() < STEP_TOL {
            break;
        }
    }
    let se = 1.0 / cur.info.sqrt();
    let z = z_critical(alpha)?;
    Ok(CoxFit {
        beta,
        se,
        hazard_ratio: beta.exp(),
        lower: (beta - z * se).exp(),
        upper: (beta + z * se).exp(),
        p_value: two_sided_p(beta, se),
        log_likelihood: cur.loglik,
        log_likelihood_null: null.loglik,
        score: cur.score,
        iterations,
        ties,
        n: sample.len(),
        n_events_treated: e1,
        n_events_control: e0,
    })
}

/// Score test of `beta = 0`: `U(0)² / I(0)`.
pub fn score_test(sample: &CompositeSample, ties: Ties) -> f64 {
    let pl = partial_likelihood(&event_table(sample), 0.0, ties);
    pl.score * pl.score / pl.info
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRank {
    pub observed_minus_expected: f64,
    pub variance: f64,
    pub chi_square: f64,
    pub p_value: f64,
}

/// Two-sample log-rank test (hypergeometric variance).
pub fn log_rank_test(sample: &CompositeSample) -> LogRank {
    let mut event_times: Vec<f64> = (0..sample.len())
        .filter(|&i| sample.events[i])
        .map(|i| sample.times[i])
        .collect();
    event_times.sort_by(f64::total_cmp);
    event_times.dedup();
    let mut o_minus_e = 0.0;
    let mut var = 0.0;
    for &t in &event_times {
        let (mut n, mut n1, mut d, mut d1) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..sample.len() {
            if sample.times[i] >= t {
                n += 1.0;
                if sample.treated[i] {
                    n1 += 1.0;
                }
                if sample.times[i] == t && sample.events[i] {
                    d += 1.0;
                    if sample.treated[i] {
                        d1 += 1.0;
                    }
                }
            }
        }
        o_minus_e += d1 - d * n1 / n;
        if n > 1.0 {
            var += n1 * (n - n1) * d * (n - d) / (n * n * (n - 1.0));
        }
    }
    let chi_square = o_minus_e * o_minus_e / var;
    LogRank {
        observed_minus_expected: o_minus_e,
        variance: var,
        chi_square,
        p_value: two_sided_p(o_minus_e, var.sqrt()),
    }
}

/// Nelson-Aalen cumulative hazard of the composite endpoint, per arm.
pub fn cumulative_hazard_curves(sample: &CompositeSample) -> Result<(StepCurve, StepCurve)> {
    let treated = fit_nelson_aalen(&sample.arm_sample(Arm::Treatment))?.cumulative_hazard();
    let control = fit_nelson_aalen(&sample.arm_sample(Arm::Control))?.cumulative_hazard();
    Ok((treated, control))
}
