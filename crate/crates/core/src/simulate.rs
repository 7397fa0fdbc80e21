//! Two-arm progressive multistate trial generator and Monte-Carlo truth.
//!
//! From each living state `j` a subject advances to `j+1` with hazard
//! `progression[j]` and, optionally, jumps straight to death with hazard
//! `death[j]`; a direct death sets every remaining transition time to the
//! death time. All of a subject's hazards share a gamma frailty with mean 1.
//! Censoring is `min(administrative time, exponential dropout)`. With an
//! assessment interval `Δ > 0`, non-fatal transitions are only seen at the
//! next visit (or at death if that comes first); death is observed exactly.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auc::subject_burden;
use crate::data::{Arm, ArmDataset, StateSpace, SubjectRecord};
use crate::error::{Error, Result};
use crate::resample::replicate_rng;
use crate::rmtif::pair_win_time;

pub const MIN_MONTE_CARLO: usize = 100_000;
const TRUTH_STREAM: u64 = 1 << 63;
const MC_BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmRates {
    /// Hazard of advancing from state `j` to `j+1`, `j = 0..=K` (per year).
    pub progression: Vec<f64>,
    /// Hazard of dying directly from non-fatal state `j = 0..K`.
    #[serde(default)]
    pub death: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialScenario {
    pub n_treated: usize,
    pub n_control: usize,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub treated: ArmRates,
    pub control: ArmRates,
    #[serde(default)]
    pub frailty_variance: f64,
    pub admin_time: f64,
    #[serde(default)]
    pub dropout_rate: f64,
    #[serde(default)]
    pub assessment_interval: f64,
    pub seed: u64,
}

impl TrialScenario {
    pub fn n_transitions(&self) -> usize {
        self.control.progression.len()
    }

    pub fn state_space(&self) -> Result<StateSpace> {
        match &self.labels {
            Some(l) => StateSpace::new(l.iter().cloned()),
            None => Ok(StateSpace::generic(self.n_transitions().saturating_sub(1))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidScenario(m.to_string()));
        if self.n_treated == 0 || self.n_control == 0 {
            return bad("both arms need at least one subject");
        }
        let m = self.n_transitions();
        if m == 0 {
            return bad("at least one transition (death) is required");
        }
        for (name, r) in [("treated", &self.treated), ("control", &self.control)] {
            if r.progression.len() != m {
                return Err(Error::InvalidScenario(format!("{name}: expected {m} progression rates")));
            }
            if !r.death.is_empty() && r.death.len() != m - 1 {
                return Err(Error::InvalidScenario(format!(
                    "{name}: expected {} direct death rates (or none)",
                    m - 1
                )));
            }
            if r.progression.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidScenario(format!("{name}: progression rates must be > 0")));
            }
            if r.death.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return Err(Error::InvalidScenario(format!("{name}: death rates must be >= 0")));
            }
        }
        if !(self.frailty_variance >= 0.0 && self.frailty_variance.is_finite()) {
            return bad("frailty variance must be >= 0");
        }
        if !(self.admin_time > 0.0 && self.admin_time.is_finite()) {
            return bad("administrative censoring time must be > 0");
        }
        if !(self.dropout_rate >= 0.0 && self.dropout_rate.is_finite()) {
            return bad("dropout rate must be >= 0");
        }
        if !(self.assessment_interval >= 0.0 && self.assessment_interval.is_finite()) {
            return bad("assessment interval must be >= 0");
        }
        self.state_space().and_then(|s| {
            if s.n_transitions() == m {
                Ok(())
            } else {
                Err(Error::InvalidScenario(format!("{} labels for {m} transitions", s.n_transitions())))
            }
        })
    }

    fn rates(&self, arm: Arm) -> &ArmRates {
        match arm {
            Arm::Treatment => &self.treated,
            Arm::Control => &self.control,
        }
    }
}

fn draw_frailty<R: Rng>(rng: &mut R, variance: f64) -> f64 {
    if variance > 0.0 {
        Gamma::new(1.0 / variance, variance).expect("valid gamma").sample(rng)
    } else {
        1.0
    }
}

/// True transition times `T_1 <= ... <= T_{K+1}` of one subject.
fn draw_process<R: Rng>(rng: &mut R, rates: &ArmRates, frailty: f64) -> Vec<f64> {
    let m = rates.progression.len();
    let mut times = Vec::with_capacity(m);
    let mut t = 0.0;
    while times.len() < m {
        let j = times.len();
        let prog = frailty * rates.progression[j];
        let death = if j + 1 < m { frailty * rates.death.get(j).copied().unwrap_or(0.0) } else { 0.0 };
        let total = prog + death;
        let gap: f64 = Exp::new(total).expect("positive rate").sample(rng);
        t += gap;
        if death > 0.0 && rng.random::<f64>() * total < death {
            times.resize(m, t);
        } else {
            times.push(t);
        }
    }
    times
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ArmTallies {
    /// Most severe state entered at the first jump, if observed.
    pub first_event: Vec<usize>,
    /// State occupied at the end of observation.
    pub worst_state: Vec<usize>,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialTallies {
    pub treated: ArmTallies,
    pub control: ArmTallies,
}

#[derive(Debug, Clone)]
pub struct SimulatedTrial {
    pub treated: ArmDataset,
    pub control: ArmDataset,
    pub tallies: TrialTallies,
}

struct Simulated {
    record: SubjectRecord,
    first: Option<usize>,
    worst: Option<usize>,
}

fn simulate_subject(scenario: &TrialScenario, arm: Arm, index: usize) -> Simulated {
    let stream = ((arm.code() as u64) << 40) | index as u64;
    let mut rng = replicate_rng(scenario.seed, stream);
    let frailty = draw_frailty(&mut rng, scenario.frailty_variance);
    let truth = draw_process(&mut rng, scenario.rates(arm), frailty);
    let dropout = if scenario.dropout_rate > 0.0 {
        Exp::new(scenario.dropout_rate).expect("positive rate").sample(&mut rng)
    } else {
        f64::INFINITY
    };
    let c = scenario.admin_time.min(dropout);
    let m = truth.len();
    let death_time = truth[m - 1];

    let seen: Vec<f64> = truth
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let delta = scenario.assessment_interval;
            if k + 1 < m && delta > 0.0 {
                ((t / delta).ceil() * delta).min(death_time)
            } else {
                t
            }
        })
        .collect();
    let events: Vec<bool> = seen.iter().map(|&t| t <= c).collect();
    let times: Vec<f64> = seen.iter().zip(&events).map(|(&t, &d)| if d { t } else { c }).collect();

    let first = (truth[0] <= c).then(|| truth.iter().rposition(|&t| t == truth[0]).unwrap());
    let worst = truth.iter().rposition(|&t| t <= c);
    let prefix = if arm == Arm::Treatment { 'T' } else { 'C' };
    Simulated {
        record: SubjectRecord::new(format!("{prefix}{:05}", index + 1), arm, times, events),
        first,
        worst,
    }
}

fn simulate_arm(scenario: &TrialScenario, arm: Arm, space: &StateSpace) -> Result<(ArmDataset, ArmTallies)> {
    let n = match arm {
        Arm::Treatment => scenario.n_treated,
        Arm::Control => scenario.n_control,
    };
    let m = space.n_transitions();
    let sims: Vec<Simulated> = (0..n).into_par_iter().map(|i| simulate_subject(scenario, arm, i)).collect();
    let mut tallies = ArmTallies {
        first_event: vec![0; m],
        worst_state: vec![0; m],
        censored: 0,
    };
    let mut records = Vec::with_capacity(n);
    for s in sims {
        if let Some(k) = s.first {
            tallies.first_event[k] += 1;
        }
        match s.worst {
            Some(k) => tallies.worst_state[k] += 1,
            None => tallies.censored += 1,
        }
        records.push(s.record);
    }
    Ok((ArmDataset::new(arm, space.clone(), records)?, tallies))
}

pub fn simulate_trial(scenario: &TrialScenario) -> Result<SimulatedTrial> {
    scenario.validate()?;
    let space = scenario.state_space()?;
    let (treated, t_tally) = simulate_arm(scenario, Arm::Treatment, &space)?;
    let (control, c_tally) = simulate_arm(scenario, Arm::Control, &space)?;
    Ok(SimulatedTrial {
        treated,
        control,
        tallies: TrialTallies {
            treated: t_tally,
            control: c_tally,
        },
    })
}

/// Uncensored, continuously observed transition times (for truth and tests).
pub fn draw_complete_process(scenario: &TrialScenario, arm: Arm, index: u64) -> Vec<f64> {
    let stream = TRUTH_STREAM | ((arm.code() as u64) << 48) | index;
    let mut rng = replicate_rng(scenario.seed, stream);
    let frailty = draw_frailty(&mut rng, scenario.frailty_variance);
    draw_process(&mut rng, scenario.rates(arm), frailty)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub tau: f64,
    pub n_mc: usize,
    pub seed: u64,
    pub auc_treated: f64,
    pub auc_control: f64,
    pub auc_treated_mcse: f64,
    pub auc_control_mcse: f64,
    pub auc_ratio: f64,
    pub auc_difference: f64,
    pub rmtif_overall: f64,
    pub rmtif_overall_mcse: f64,
    pub rmtif_stages: Vec<f64>,
    /// Exact composite HR when the first transition is exponential in both
    /// arms (no frailty).
    pub composite_hazard_ratio: Option<f64>,
}

#[derive(Default, Clone)]
struct Moments {
    a1: f64,
    a1_sq: f64,
    a0: f64,
    a0_sq: f64,
    w: f64,
    w_sq: f64,
    stages: Vec<f64>,
}

/// Monte-Carlo estimands from `n_mc` complete processes per arm, pairing the
/// `i`-th treated draw with the `i`-th control draw for win times.
pub fn true_estimands(scenario: &TrialScenario, tau: f64, n_mc: usize) -> Result<TruthTable> {
    scenario.validate()?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::NonPositiveHorizon(tau));
    }
    if n_mc < MIN_MONTE_CARLO {
        return Err(Error::InvalidScenario(format!("n_mc must be at least {MIN_MONTE_CARLO}")));
    }
    let m = scenario.n_transitions();
    let blocks: Vec<Moments> = (0..n_mc.div_ceil(MC_BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = Moments {
                stages: vec![0.0; m],
                ..Default::default()
            };
            let mut pair = vec![0.0; m];
            for i in b * MC_BLOCK..((b + 1) * MC_BLOCK).min(n_mc) {
                let t1 = draw_complete_process(scenario, Arm::Treatment, i as u64);
                let t0 = draw_complete_process(scenario, Arm::Control, i as u64);
                let a1 = subject_burden(&t1, tau);
                let a0 = subject_burden(&t0, tau);
                acc.a1 += a1;
                acc.a1_sq += a1 * a1;
                acc.a0 += a0;
                acc.a0_sq += a0 * a0;
                pair.iter_mut().for_each(|v| *v = 0.0);
                pair_win_time(&t1, &t0, tau, &mut pair);
                let w: f64 = pair.iter().sum();
                acc.w += w;
                acc.w_sq += w * w;
                for (s, p) in acc.stages.iter_mut().zip(&pair) {
                    *s += p;
                }
            }
            acc
        })
        .collect();
    let mut tot = Moments {
        stages: vec![0.0; m],
        ..Default::default()
    };
    for b in &blocks {
        tot.a1 += b.a1;
        tot.a1_sq += b.a1_sq;
        tot.a0 += b.a0;
        tot.a0_sq += b.a0_sq;
        tot.w += b.w;
        tot.w_sq += b.w_sq;
        for (s, p) in tot.stages.iter_mut().zip(&b.stages) {
            *s += p;
        }
    }
    let n = n_mc as f64;
    let mcse = |sum: f64, sq: f64| {
        let var = ((sq - sum * sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    };
    let auc_treated = tot.a1 / n;
    let auc_control = tot.a0 / n;
    let composite_hazard_ratio = (scenario.frailty_variance == 0.0).then(|| {
        let first = |r: &ArmRates| r.progression[0] + if m > 1 { r.death.first().copied().unwrap_or(0.0) } else { 0.0 };
        first(&scenario.treated) / first(&scenario.control)
    });
    Ok(TruthTable {
        tau,
        n_mc,
        seed: scenario.seed,
        auc_treated,
        auc_control,
        auc_treated_mcse: mcse(tot.a1, tot.a1_sq),
        auc_control_mcse: mcse(tot.a0, tot.a0_sq),
        auc_ratio: auc_treated / auc_control,
        auc_difference: auc_treated - auc_control,
        rmtif_overall: tot.w / n,
        rmtif_overall_mcse: mcse(tot.w, tot.w_sq),
        rmtif_stages: tot.stages.iter().map(|s| s / n).collect(),
        composite_hazard_ratio,
    })
}
