//! Configured analysis runs and report emission.
//!
//! Every number in the bundle comes straight from a library call; this
//! module only projects datasets, collects results and writes them out.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::auc::{auc_contrast, mean_score_curve, running_auc_ratio, AucContrast};
use crate::config::{AnalysisConfig, EndpointSubset, SimulationConfig};
use crate::cox::{cumulative_hazard_curves, fit_cox_hr_with, log_rank_test, to_composite, CoxFit, LogRank, Ties};
use crate::data::{project_by_labels, summarize_first_events, summarize_worst_state, FirstEventTable, WorstStateTable};
use crate::error::{Error, Result};
use crate::io::{save_csv, write_csv, TrialData};
use crate::rmtif::{rmtif_infer, BootstrapConfig, RmtifReport};
use crate::simulate::{simulate_trial, true_estimands, SimulatedTrial, TrialTallies, TruthTable};
use crate::utility::{expected_utility_contrast, UtilityContrast, UtilitySpec};

pub const SOFTWARE: &str = concat!("burden ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ok(T),
    Failed { error: String },
}

impl<T> Outcome<T> {
    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Failed { error: e.to_string() },
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Failed { .. } => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, Outcome::Failed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmPair<T> {
    pub treated: T,
    pub control: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoints {
    /// Composite-endpoint Nelson-Aalen curves, `(time, cumulative hazard)`.
    pub composite_cumulative_hazard: ArmPair<Vec<(f64, f64)>>,
    /// Mean cumulative score curves on `[0, tau]`, `(time, score)`.
    pub mean_score: ArmPair<Vec<(f64, f64)>>,
    /// `(time, running AUC ratio)`.
    pub running_auc_ratio: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetResult {
    pub name: String,
    pub endpoints: Vec<String>,
    pub cox: Outcome<CoxFit>,
    pub log_rank: Outcome<LogRank>,
    pub auc: Outcome<AucContrast>,
    pub rmtif: Outcome<RmtifReport>,
    pub utility: Outcome<UtilityContrast>,
    pub first_events: ArmPair<FirstEventTable>,
    pub worst_state: ArmPair<WorstStateTable>,
    pub curves: Outcome<CurvePoints>,
}

impl SubsetResult {
    pub fn failed(&self) -> bool {
        self.cox.is_failed()
            || self.log_rank.is_failed()
            || self.auc.is_failed()
            || self.rmtif.is_failed()
            || self.utility.is_failed()
            || self.curves.is_failed()
    }
}

/// One row of the endpoint-sensitivity table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub endpoints: String,
    pub cox_hr: Option<f64>,
    pub cox_lower: Option<f64>,
    pub cox_upper: Option<f64>,
    pub cox_p: Option<f64>,
    pub auc_ratio: Option<f64>,
    pub auc_ratio_lower: Option<f64>,
    pub auc_ratio_upper: Option<f64>,
    pub auc_ratio_p: Option<f64>,
    pub auc_difference: Option<f64>,
    pub auc_difference_se: Option<f64>,
    pub auc_difference_p: Option<f64>,
    pub rmtif: Option<f64>,
    pub rmtif_se: Option<f64>,
    pub rmtif_p: Option<f64>,
}

impl SensitivityRow {
    fn from_subset(s: &SubsetResult) -> Self {
        let cox = s.cox.ok();
        let auc = s.auc.ok();
        let ratio = auc.and_then(|a| a.ratio.as_ref());
        let rmtif = s.rmtif.ok();
        Self {
            endpoints: s.name.clone(),
            cox_hr: cox.map(|c| c.hazard_ratio),
            cox_lower: cox.map(|c| c.lower),
            cox_upper: cox.map(|c| c.upper),
            cox_p: cox.map(|c| c.p_value),
            auc_ratio: ratio.map(|r| r.ratio),
            auc_ratio_lower: ratio.map(|r| r.lower),
            auc_ratio_upper: ratio.map(|r| r.upper),
            auc_ratio_p: ratio.map(|r| r.p_value),
            auc_difference: auc.map(|a| a.difference.estimate),
            auc_difference_se: auc.map(|a| a.difference.se),
            auc_difference_p: auc.map(|a| a.difference.p_value),
            rmtif: rmtif.map(|r| r.overall.estimate),
            rmtif_se: rmtif.map(|r| r.overall.se),
            rmtif_p: rmtif.map(|r| r.overall.p_value),
        }
    }
}

/// Configuration as recorded in the summary (paths omitted).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordedConfig {
    pub tau: f64,
    pub alpha: f64,
    pub endpoints: Vec<String>,
    pub scores: Vec<f64>,
    pub bootstrap: BootstrapConfig,
    pub ties: Ties,
    pub sensitivity: Vec<EndpointSubset>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub software: String,
    pub config_sha256: String,
    pub data_sha256: String,
    pub bootstrap_seed: u64,
    pub n_treated: usize,
    pub n_control: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisBundle {
    pub provenance: Provenance,
    pub config: RecordedConfig,
    pub sensitivity: Vec<SensitivityRow>,
    pub subsets: Vec<SubsetResult>,
}

impl AnalysisBundle {
    pub fn failed(&self) -> bool {
        self.subsets.iter().any(SubsetResult::failed)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Analyzes one endpoint subset of both arms.
pub fn analyze_subset(
    data: &TrialData,
    subset: &EndpointSubset,
    tau: f64,
    alpha: f64,
    bootstrap: BootstrapConfig,
    ties: Ties,
    scores: &[f64],
) -> Result<SubsetResult> {
    let treated = project_by_labels(&data.treated, &subset.keep)?;
    let control = project_by_labels(&data.control, &subset.keep)?;
    let full = data.treated.state_space();
    let subset_scores: Vec<f64> = subset
        .keep
        .iter()
        .map(|l| scores[full.index_of(l).expect("projected")])
        .collect();

    let composite = to_composite(&treated, &control);
    let cox = Outcome::from_result(fit_cox_hr_with(&composite, alpha, ties));
    let log_rank = Outcome::from_result(if composite.events.iter().any(|&e| e) {
        Ok(log_rank_test(&composite))
    } else {
        Err(Error::NoEvents("composite endpoint".into()))
    });
    let auc = Outcome::from_result(auc_contrast(&treated, &control, tau, alpha));
    let rmtif = Outcome::from_result(rmtif_infer(&treated, &control, tau, bootstrap, alpha));
    let utility = Outcome::from_result(
        UtilitySpec::fixed(subset_scores).and_then(|spec| expected_utility_contrast(&treated, &control, &spec, tau)),
    );
    let curves = Outcome::from_result((|| {
        let (h1, h0) = cumulative_hazard_curves(&composite)?;
        let m1 = mean_score_curve(&treated, tau)?;
        let m0 = mean_score_curve(&control, tau)?;
        Ok(CurvePoints {
            composite_cumulative_hazard: ArmPair {
                treated: h1.points(),
                control: h0.points(),
            },
            running_auc_ratio: running_auc_ratio(&m1, &m0, tau),
            mean_score: ArmPair {
                treated: m1.points(),
                control: m0.points(),
            },
        })
    })());
    Ok(SubsetResult {
        name: subset.name.clone(),
        endpoints: subset.keep.clone(),
        cox,
        log_rank,
        auc,
        rmtif,
        utility,
        first_events: ArmPair {
            treated: summarize_first_events(&treated),
            control: summarize_first_events(&control),
        },
        worst_state: ArmPair {
            treated: summarize_worst_state(&treated),
            control: summarize_worst_state(&control),
        },
        curves,
    })
}

fn failed_subset(subset: &EndpointSubset, err: Error) -> SubsetResult {
    let msg = err.to_string();
    fn failed<T>(msg: &str) -> Outcome<T> {
        Outcome::Failed { error: msg.to_string() }
    }
    let empty_first = FirstEventTable {
        labels: vec![],
        counts: vec![],
        total_events: 0,
        n: 0,
    };
    let empty_worst = WorstStateTable {
        labels: vec![],
        censored: 0,
        counts: vec![],
        total: 0,
    };
    SubsetResult {
        name: subset.name.clone(),
        endpoints: subset.keep.clone(),
        cox: failed(&msg),
        log_rank: failed(&msg),
        auc: failed(&msg),
        rmtif: failed(&msg),
        utility: failed(&msg),
        first_events: ArmPair {
            treated: empty_first.clone(),
            control: empty_first,
        },
        worst_state: ArmPair {
            treated: empty_worst.clone(),
            control: empty_worst,
        },
        curves: failed(&msg),
    }
}

/// Runs every configured endpoint subset on `data`. Subsets are computed
/// from projections of the one dataset; a failing subset does not stop the
/// others.
pub fn run_analysis(config: &AnalysisConfig, data: &TrialData) -> Result<AnalysisBundle> {
    config.validate()?;
    let space = data.treated.state_space();
    if data.control.state_space() != space {
        return Err(Error::StateSpaceMismatch);
    }
    let labels = space.labels().to_vec();
    if let Some(expected) = &config.endpoints {
        if expected != &labels {
            return Err(Error::Config(format!(
                "configured endpoints {expected:?} differ from input columns {labels:?}"
            )));
        }
    }
    let scores = match &config.scores {
        Some(s) if s.len() != labels.len() => {
            return Err(Error::Config(format!("{} scores for {} endpoints", s.len(), labels.len())))
        }
        Some(s) => s.clone(),
        None => (1..=labels.len()).map(|k| k as f64).collect(),
    };
    let subsets = if config.sensitivity.is_empty() {
        vec![EndpointSubset {
            name: "All endpoints".into(),
            keep: labels.clone(),
        }]
    } else {
        config.sensitivity.clone()
    };

    let results: Vec<SubsetResult> = subsets
        .par_iter()
        .map(|s| {
            analyze_subset(data, s, config.tau, config.alpha, config.bootstrap, config.ties, &scores)
                .unwrap_or_else(|e| failed_subset(s, e))
        })
        .collect();

    let recorded = RecordedConfig {
        tau: config.tau,
        alpha: config.alpha,
        endpoints: labels,
        scores,
        bootstrap: config.bootstrap,
        ties: config.ties,
        sensitivity: subsets,
    };
    let mut csv_bytes = Vec::new();
    write_csv(&mut csv_bytes, &data.treated, &data.control)?;
    let provenance = Provenance {
        software: SOFTWARE.to_string(),
        config_sha256: sha256_hex(serde_json::to_string(&recorded)?.as_bytes()),
        data_sha256: sha256_hex(&csv_bytes),
        bootstrap_seed: config.bootstrap.seed,
        n_treated: data.treated.len(),
        n_control: data.control.len(),
    };
    Ok(AnalysisBundle {
        provenance,
        config: recorded,
        sensitivity: results.iter().map(SensitivityRow::from_subset).collect(),
        subsets: results,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_subset(dir: &Path, s: &SubsetResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    if let Some(cox) = s.cox.ok() {
        write_rows(
            &dir.join("cox.csv"),
            &["hazard_ratio", "lower", "upper", "p_value", "beta", "se", "log_likelihood", "events_treated", "events_control"],
            &[vec![
                cox.hazard_ratio.to_string(),
                cox.lower.to_string(),
                cox.upper.to_string(),
                cox.p_value.to_string(),
                cox.beta.to_string(),
                cox.se.to_string(),
                cox.log_likelihood.to_string(),
                cox.n_events_treated.to_string(),
                cox.n_events_control.to_string(),
            ]],
        )?;
    }
    if let Some(auc) = s.auc.ok() {
        let wald_row = |name: &str, w: &crate::inference::Wald| {
            vec![
                name.to_string(),
                w.estimate.to_string(),
                w.se.to_string(),
                w.lower.to_string(),
                w.upper.to_string(),
                w.p_value.to_string(),
            ]
        };
        let mut rows = vec![
            vec!["auc_treated".into(), auc.treated.auc.to_string(), auc.treated.se.to_string(), "".into(), "".into(), "".into()],
            vec!["auc_control".into(), auc.control.auc.to_string(), auc.control.se.to_string(), "".into(), "".into(), "".into()],
            wald_row("difference", &auc.difference),
        ];
        if let Some(r) = &auc.ratio {
            rows.push(vec![
                "ratio".into(),
                r.ratio.to_string(),
                "".into(),
                r.lower.to_string(),
                r.upper.to_string(),
                r.p_value.to_string(),
            ]);
            rows.push(wald_row("log_ratio", &r.log_ratio));
        }
        for (label, d) in auc.labels.iter().zip(&auc.component_differences) {
            rows.push(vec![format!("time_free_of:{label}"), d.to_string(), "".into(), "".into(), "".into(), "".into()]);
        }
        write_rows(&dir.join("auc.csv"), &["quantity", "estimate", "se", "lower", "upper", "p_value"], &rows)?;
    }
    if let Some(r) = s.rmtif.ok() {
        let mut rows: Vec<Vec<String>> = r
            .labels
            .iter()
            .zip(&r.stages)
            .map(|(l, w)| {
                vec![l.clone(), w.estimate.to_string(), w.se.to_string(), w.lower.to_string(), w.upper.to_string(), w.p_value.to_string()]
            })
            .collect();
        let o = &r.overall;
        rows.push(vec![
            "Overall RMT-IF".into(),
            o.estimate.to_string(),
            o.se.to_string(),
            o.lower.to_string(),
            o.upper.to_string(),
            o.p_value.to_string(),
        ]);
        write_rows(&dir.join("rmtif.csv"), &["outcome_avoided", "estimate", "se", "lower", "upper", "p_value"], &rows)?;
    }
    let labels = &s.first_events.treated.labels;
    let mut header: Vec<&str> = vec!["arm"];
    header.extend(labels.iter().map(String::as_str));
    header.push("total_events");
    let first_row = |arm: &str, t: &FirstEventTable| {
        let mut r = vec![arm.to_string()];
        r.extend(t.counts.iter().map(|c| c.to_string()));
        r.push(t.total_events.to_string());
        r
    };
    write_rows(
        &dir.join("first_events.csv"),
        &header,
        &[first_row("treated", &s.first_events.treated), first_row("control", &s.first_events.control)],
    )?;
    let mut header: Vec<&str> = vec!["arm", "censored"];
    header.extend(labels.iter().map(String::as_str));
    header.push("total");
    let worst_row = |arm: &str, t: &WorstStateTable| {
        let mut r = vec![arm.to_string(), t.censored.to_string()];
        r.extend(t.counts.iter().map(|c| c.to_string()));
        r.push(t.total.to_string());
        r
    };
    write_rows(
        &dir.join("worst_state.csv"),
        &header,
        &[worst_row("treated", &s.worst_state.treated), worst_row("control", &s.worst_state.control)],
    )?;
    if let Some(c) = s.curves.ok() {
        let arm_rows = |pair: &ArmPair<Vec<(f64, f64)>>| -> Vec<Vec<String>> {
            [("treated", &pair.treated), ("control", &pair.control)]
                .into_iter()
                .flat_map(|(arm, pts)| pts.iter().map(move |(t, v)| vec![arm.to_string(), t.to_string(), v.to_string()]))
                .collect()
        };
        write_rows(
            &dir.join("composite_cumhaz.csv"),
            &["arm", "time", "cumulative_hazard"],
            &arm_rows(&c.composite_cumulative_hazard),
        )?;
        write_rows(&dir.join("mean_score.csv"), &["arm", "time", "mean_score"], &arm_rows(&c.mean_score))?;
        let rows: Vec<Vec<String>> = c
            .running_auc_ratio
            .iter()
            .map(|(t, r)| vec![t.to_string(), r.to_string()])
            .collect();
        write_rows(&dir.join("running_auc_ratio.csv"), &["time", "auc_ratio"], &rows)?;
    }
    Ok(())
}

/// Writes `summary.json`, `sensitivity.csv` and one directory per subset.
pub fn write_bundle(bundle: &AnalysisBundle, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let rows: Vec<Vec<String>> = bundle
        .sensitivity
        .iter()
        .map(|r| {
            vec![
                r.endpoints.clone(),
                opt(r.cox_hr),
                opt(r.cox_lower),
                opt(r.cox_upper),
                opt(r.cox_p),
                opt(r.auc_ratio),
                opt(r.auc_ratio_lower),
                opt(r.auc_ratio_upper),
                opt(r.auc_ratio_p),
                opt(r.auc_difference),
                opt(r.auc_difference_se),
                opt(r.auc_difference_p),
                opt(r.rmtif),
                opt(r.rmtif_se),
                opt(r.rmtif_p),
            ]
        })
        .collect();
    write_rows(
        &dir.join("sensitivity.csv"),
        &[
            "endpoints",
            "cox_hr",
            "cox_lower",
            "cox_upper",
            "cox_p",
            "auc_ratio",
            "auc_ratio_lower",
            "auc_ratio_upper",
            "auc_ratio_p",
            "auc_difference",
            "auc_difference_se",
            "auc_difference_p",
            "rmtif",
            "rmtif_se",
            "rmtif_p",
        ],
        &rows,
    )?;
    for (i, s) in bundle.subsets.iter().enumerate() {
        write_subset(&dir.join(format!("subset_{:02}", i + 1)), s)?;
    }
    let mut f = fs::File::create(dir.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut f, bundle)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub trial: SimulatedTrial,
    pub truth: TruthTable,
}

pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationOutput> {
    let trial = simulate_trial(&config.scenario)?;
    let truth = true_estimands(&config.scenario, config.tau, config.n_mc)?;
    Ok(SimulationOutput { trial, truth })
}

#[derive(Serialize)]
struct TallyFile<'a> {
    labels: &'a [String],
    tallies: &'a TrialTallies,
}

/// Writes `data.csv`, `truth.json` and `tallies.json`.
pub fn write_simulation(out: &SimulationOutput, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    save_csv(dir.join("data.csv"), &out.trial.treated, &out.trial.control)?;
    let mut f = fs::File::create(dir.join("truth.json"))?;
    serde_json::to_writer_pretty(&mut f, &out.truth)?;
    f.write_all(b"\n")?;
    let mut f = fs::File::create(dir.join("tallies.json"))?;
    serde_json::to_writer_pretty(
        &mut f,
        &TallyFile {
            labels: out.trial.treated.state_space().labels(),
            tallies: &out.trial.tallies,
        },
    )?;
    f.write_all(b"\n")?;
    Ok(())
}
