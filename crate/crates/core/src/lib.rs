//! Burden-of-disease analysis for multistate time-to-event trials: area under
//! the mean cumulative score curve, restricted mean time in favor, composite
//! Cox comparator, trial simulation and configured report runs.

pub mod auc;
pub mod config;
pub mod cox;
pub mod data;
pub mod error;
pub mod inference;
pub mod io;
pub mod km;
pub mod pipeline;
pub mod resample;
pub mod rmtif;
pub mod simulate;
pub mod step;
pub mod utility;

pub use auc::{auc_arm, auc_contrast, mean_score_curve, AucArmEstimate, AucContrast};
pub use config::{AnalysisConfig, EndpointSubset, SimulationConfig};
pub use cox::{fit_cox_hr, log_rank_test, to_composite, CoxFit, Ties};
pub use data::{project_by_labels, project_endpoints, Arm, ArmDataset, StateSpace, SubjectRecord};
pub use error::{Error, Result, ValidationRule};
pub use inference::Wald;
pub use io::{ingest_csv, read_csv, save_csv, write_csv, TrialData};
pub use km::{fit_km, fit_nelson_aalen, rmst, TransitionSample};
pub use pipeline::{run_analysis, run_simulation, write_bundle, write_simulation, AnalysisBundle};
pub use rmtif::{rmtif_estimate, rmtif_infer, BootstrapConfig, CiMethod, RmtifEstimate, RmtifReport};
pub use simulate::{simulate_trial, true_estimands, ArmRates, TrialScenario, TruthTable};
pub use step::StepCurve;
pub use utility::{expected_utility, expected_utility_contrast, UtilitySpec};
