//! Multistate data model for progressive processes.
//!
//! A subject moves through ordered states `0, 1, ..., K, K+1` where state
//! `K+1` is death. For each transition `k = 1..=K+1` we observe
//! `X_k = min(T_k, C)` and `δ_k = 1{T_k <= C}`, stored here with zero-based
//! indices (`times[0]` is the first transition, `times[K]` is death).
//!
//! Skipped intermediate states are recorded as events at the time the more
//! severe state was first observed, so ties `x_j == x_{j+1}` with both
//! events set are legal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arm {
    Control,
    Treatment,
}

impl Arm {
    pub fn code(self) -> u8 {
        match self {
            Arm::Control => 0,
            Arm::Treatment => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Arm::Control),
            1 => Some(Arm::Treatment),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Arm::Control => "control",
            Arm::Treatment => "treatment",
        }
    }
}

/// Ordered transition labels. The last label is always death.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::StateSpace("at least the death transition is required".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.trim().is_empty() {
                return Err(Error::StateSpace(format!("label {} is blank", i + 1)));
            }
            if labels[..i].contains(l) {
                return Err(Error::StateSpace(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// Generic labels `state_1, ..., state_K, death`.
    pub fn generic(k_severity_states: usize) -> Self {
        let mut labels: Vec<String> = (1..=k_severity_states).map(|k| format!("state_{k}")).collect();
        labels.push("death".to_string());
        Self { labels }
    }

    /// The five hierarchical renal endpoints.
    pub fn renal() -> Self {
        Self::new(["40% decline", "50% decline", "57% decline", "ESRD", "death"]).unwrap()
    }

    /// Number of non-fatal severity states `K`.
    pub fn k(&self) -> usize {
        self.labels.len() - 1
    }

    /// Number of transitions `K + 1`.
    pub fn n_transitions(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn death_label(&self) -> &str {
        self.labels.last().expect("non-empty")
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub subject_id: String,
    pub arm: Arm,
    pub times: Vec<f64>,
    pub events: Vec<bool>,
}

impl SubjectRecord {
    pub fn new(subject_id: impl Into<String>, arm: Arm, times: Vec<f64>, events: Vec<bool>) -> Self {
        Self {
            subject_id: subject_id.into(),
            arm,
            times,
            events,
        }
    }

    pub fn n_events(&self) -> usize {
        self.events.iter().filter(|&&d| d).count()
    }

    /// Index of the most severe observed transition.
    pub fn worst_state(&self) -> Option<usize> {
        self.events.iter().rposition(|&d| d)
    }

    /// Most severe transition observed at the first event time.
    pub fn first_event_state(&self) -> Option<usize> {
        let first = self.events.iter().position(|&d| d)?;
        let t = self.times[first];
        (first..self.times.len())
            .take_while(|&k| self.events[k] && self.times[k] == t)
            .last()
    }

    /// Censoring time if any transition is censored.
    pub fn censoring_time(&self) -> Option<f64> {
        self.events.iter().position(|&d| !d).map(|k| self.times[k])
    }
}

pub fn validate_subject(record: &SubjectRecord, space: &StateSpace) -> Result<(), ValidationRule> {
    let m = space.n_transitions();
    if record.times.len() != m || record.events.len() != m {
        return Err(ValidationRule::LengthMismatch);
    }
    if record.times.iter().any(|t| !t.is_finite()) {
        return Err(ValidationRule::NonFiniteTime);
    }
    if record.times.iter().any(|&t| t < 0.0) {
        return Err(ValidationRule::NegativeTime);
    }
    if record.times.windows(2).any(|w| w[1] < w[0]) {
        return Err(ValidationRule::MonotonicityViolation);
    }
    if record.events.windows(2).any(|w| !w[0] && w[1]) {
        return Err(ValidationRule::IndicatorViolation);
    }
    if let Some(c) = record.censoring_time() {
        let censored_differ = record
            .times
            .iter()
            .zip(&record.events)
            .any(|(&t, &d)| !d && t != c);
        if censored_differ {
            return Err(ValidationRule::CensorMismatch);
        }
    }
    Ok(())
}

/// All subjects of one arm, validated against a shared state space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmDataset {
    arm: Arm,
    state_space: StateSpace,
    subjects: Vec<SubjectRecord>,
}

impl ArmDataset {
    pub fn new(arm: Arm, state_space: StateSpace, subjects: Vec<SubjectRecord>) -> Result<Self> {
        if subjects.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for s in &subjects {
            if s.arm != arm {
                return Err(Error::ArmMismatch(format!(
                    "subject {} is in the {} arm, dataset is {}",
                    s.subject_id,
                    s.arm.name(),
                    arm.name()
                )));
            }
            validate_subject(s, &state_space).map_err(|rule| Error::Validation {
                subject_id: s.subject_id.clone(),
                rule,
            })?;
        }
        Ok(Self {
            arm,
            state_space,
            subjects,
        })
    }

    pub fn arm(&self) -> Arm {
        self.arm
    }

    pub fn state_space(&self) -> &StateSpace {
        &self.state_space
    }

    pub fn subjects(&self) -> &[SubjectRecord] {
        &self.subjects
    }

    pub fn len(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    pub fn n_transitions(&self) -> usize {
        self.state_space.n_transitions()
    }

    /// Largest observed time across all transitions.
    pub fn max_time(&self) -> f64 {
        self.subjects
            .iter()
            .flat_map(|s| s.times.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Builds a dataset from indices into this one (bootstrap resamples).
    /// Indices must be in range and non-empty.
    pub(crate) fn resample(&self, indices: &[usize]) -> Self {
        debug_assert!(!indices.is_empty());
        Self {
            arm: self.arm,
            state_space: self.state_space.clone(),
            subjects: indices.iter().map(|&i| self.subjects[i].clone()).collect(),
        }
    }

    /// Every record repeated `copies` times.
    pub fn replicate(&self, copies: usize) -> Self {
        let mut subjects = Vec::with_capacity(self.subjects.len() * copies);
        for c in 0..copies {
            subjects.extend(self.subjects.iter().map(|s| SubjectRecord {
                subject_id: format!("{}#{c}", s.subject_id),
                ..s.clone()
            }));
        }
        Self {
            arm: self.arm,
            state_space: self.state_space.clone(),
            subjects,
        }
    }
}

/// Keeps only the transitions at `keep` (zero-based, strictly increasing,
/// last one must be death). Retained transitions keep their `(x, δ)`.
pub fn project_endpoints(data: &ArmDataset, keep: &[usize]) -> Result<ArmDataset> {
    let m = data.n_transitions();
    if keep.is_empty() {
        return Err(Error::InvalidSubset("no transitions kept".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSubset("transitions must be listed in severity order".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= m) {
        return Err(Error::InvalidSubset(format!("transition index {bad} out of range")));
    }
    if *keep.last().unwrap() != m - 1 {
        return Err(Error::DeathExcluded);
    }
    let labels = keep.iter().map(|&k| data.state_space.labels[k].clone());
    let space = StateSpace::new(labels)?;
    let subjects = data
        .subjects
        .iter()
        .map(|s| SubjectRecord {
            subject_id: s.subject_id.clone(),
            arm: s.arm,
            times: keep.iter().map(|&k| s.times[k]).collect(),
            events: keep.iter().map(|&k| s.events[k]).collect(),
        })
        .collect();
    Ok(ArmDataset {
        arm: data.arm,
        state_space: space,
        subjects,
    })
}

/// Label-based variant of [`project_endpoints`].
pub fn project_by_labels<S: AsRef<str>>(data: &ArmDataset, keep: &[S]) -> Result<ArmDataset> {
    let space = data.state_space();
    if !keep.iter().any(|l| l.as_ref() == space.death_label()) {
        return Err(Error::DeathExcluded);
    }
    let idx = keep
        .iter()
        .map(|l| {
            space
                .index_of(l.as_ref())
                .ok_or_else(|| Error::InvalidSubset(format!("unknown endpoint {:?}", l.as_ref())))
        })
        .collect::<Result<Vec<_>>>()?;
    project_endpoints(data, &idx)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirstEventTable {
    pub labels: Vec<String>,
    pub counts: Vec<usize>,
    pub total_events: usize,
    pub n: usize,
}

/// Tally of each subject's first observed event. Ties at the first event
/// time go to the most severe tied transition.
pub fn summarize_first_events(data: &ArmDataset) -> FirstEventTable {
    let mut counts = vec![0usize; data.n_transitions()];
    for s in data.subjects() {
        if let Some(k) = s.first_event_state() {
            counts[k] += 1;
        }
    }
    FirstEventTable {
        labels: data.state_space().labels().to_vec(),
        total_events: counts.iter().sum(),
        counts,
        n: data.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorstStateTable {
    pub labels: Vec<String>,
    pub censored: usize,
    pub counts: Vec<usize>,
    pub total: usize,
}

pub fn summarize_worst_state(data: &ArmDataset) -> WorstStateTable {
    let mut counts = vec![0usize; data.n_transitions()];
    let mut censored = 0;
    for s in data.subjects() {
        match s.worst_state() {
            Some(k) => counts[k] += 1,
            None => censored += 1,
        }
    }
    WorstStateTable {
        labels: data.state_space().labels().to_vec(),
        censored,
        total: censored + counts.iter().sum::<usize>(),
        counts,
    }
}
