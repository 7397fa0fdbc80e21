//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary so the PASS/FAIL lines are always printed. Pass
//! criterion numbers as arguments to run a subset:
//! `cargo test --test acceptance -- 3 7`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use burden::auc::{auc_contrast, auc_influence_se, auc_point, mean_score_curve};
use burden::config::{AnalysisConfig, EndpointSubset, SimulationConfig};
use burden::cox::{fit_cox_hr, log_rank_test, score_test, to_composite, Ties};
use burden::data::{Arm, ArmDataset, StateSpace, SubjectRecord};
use burden::inference::sample_sd;
use burden::km::{fit_km, rmst, TransitionSample};
use burden::pipeline::run_analysis;
use burden::resample::bootstrap_arm;
use burden::rmtif::{rmtif_estimate, rmtif_infer, rmtif_pairwise_oracle, BootstrapConfig, CiMethod};
use burden::simulate::{simulate_trial, true_estimands, ArmRates, TrialScenario, TruthTable};
use burden::utility::{expected_utility_contrast, UtilitySpec};
use burden::TrialData;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel_close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(scale)
}

// ---------------------------------------------------------------- fuzzing

/// Random valid arm: nondecreasing times with skipped-state ties, optional
/// grid rounding (cross-subject ties) and optional censoring.
fn random_arm(rng: &mut ChaCha8Rng, arm: Arm, k: usize, n: usize, censor: bool, grid: bool) -> ArmDataset {
    let m = k + 1;
    let round = |x: f64| if grid { (x * 4.0).ceil() / 4.0 } else { x };
    let subjects = (0..n)
        .map(|i| {
            let mut t = 0.0;
            let mut times = Vec::with_capacity(m);
            for j in 0..m {
                let skip = j > 0 && rng.random_bool(0.2);
                if !skip {
                    t += 0.05 + rng.random::<f64>() * 2.5;
                }
                times.push(round(t));
            }
            let mut events = vec![true; m];
            if censor && rng.random_bool(0.4) {
                let c = round(0.05 + rng.random::<f64>() * times[m - 1] * 1.2);
                for j in 0..m {
                    if times[j] > c {
                        times[j] = c;
                        events[j] = false;
                    }
                }
            }
            SubjectRecord::new(format!("s{i}"), arm, times, events)
        })
        .collect();
    ArmDataset::new(arm, StateSpace::generic(k), subjects).expect("valid random arm")
}

fn complete_arm_pair(rng: &mut ChaCha8Rng, k: usize, grid: bool) -> (ArmDataset, ArmDataset) {
    let n1 = rng.random_range(1..30);
    let n0 = rng.random_range(1..30);
    (
        random_arm(rng, Arm::Treatment, k, n1, false, grid),
        random_arm(rng, Arm::Control, k, n0, false, grid),
    )
}

// ---------------------------------------------------------------- criteria

fn c1_small_km() -> Outcome {
    let sample = TransitionSample::new(vec![1.0, 2.0, 3.0], vec![true, false, true]).unwrap();
    let s = fit_km(&sample).unwrap();
    let two_thirds = 2.0 / 3.0;
    let ulp = f64::EPSILON;
    let on_plateau = [1.0, 1.5, 2.0, 2.999_999].iter().all(|&t| (s.eval(t) - two_thirds).abs() <= ulp);
    let before = s.eval(0.999) == 1.0;
    let after = s.eval(3.0) == 0.0;
    let r = rmst(&s, 3.0).unwrap();
    let rmst_ok = (r - 7.0 / 3.0).abs() <= 4.0 * ulp;
    outcome(
        on_plateau && before && after && rmst_ok,
        format!("S(1)={:.17}, S(3)={}, rmst(3)={r:.17}", s.eval(1.0), s.eval(3.0)),
    )
}

fn c2_auc_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let n_sets = 1000;
    for i in 0..n_sets {
        let k = i % 5;
        let n = rng.random_range(1..40);
        let grid = rng.random_bool(0.5);
        let data = random_arm(&mut rng, Arm::Control, k, n, true, grid);
        let tau = 0.5 + rng.random::<f64>() * 8.0;
        let auc = auc_point(&data, tau).unwrap();
        let sum_rmst: f64 = (0..=k)
            .map(|j| rmst(&fit_km(&TransitionSample::from_dataset(&data, j)).unwrap(), tau).unwrap())
            .sum();
        let via_rmst = (k as f64 + 1.0) * tau - sum_rmst;
        let via_curve = mean_score_curve(&data, tau).unwrap().area_to(tau);
        let scale = (k as f64 + 1.0) * tau;
        for other in [via_rmst, via_curve] {
            worst = worst.max((auc - other).abs() / auc.abs().max(other.abs()).max(scale));
            if !rel_close(auc, other, 1e-12, scale) {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{n_sets} datasets, K in 0..=4, worst relative gap {worst:.2e}, failures {failures}"),
    )
}

fn c3_rmtif_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let n_sets = 500;
    for i in 0..n_sets {
        let k = i % 5;
        let grid = rng.random_bool(0.5);
        let (t, c) = complete_arm_pair(&mut rng, k, grid);
        let tau = 0.5 + rng.random::<f64>() * 8.0;
        let est = rmtif_estimate(&t, &c, tau).unwrap();
        let oracle = rmtif_pairwise_oracle(&t, &c, tau).unwrap();
        let pairs = std::iter::once((est.overall, oracle.overall)).chain(est.stages.iter().copied().zip(oracle.stages.iter().copied()));
        for (a, b) in pairs {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(tau));
            if !rel_close(a, b, 1e-12, tau) {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{n_sets} uncensored datasets, worst relative gap {worst:.2e}, failures {failures}"),
    )
}

fn c4_reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 3];
    let mut failures = [0usize; 3];
    let n_sets = 300;
    for i in 0..n_sets {
        let tau = 0.5 + rng.random::<f64>() * 8.0;

        // (a) K = 0: RMT-IF is the death RMST difference
        let n1 = rng.random_range(2..40);
        let n0 = rng.random_range(2..40);
        let grid = rng.random_bool(0.5);
        let t = random_arm(&mut rng, Arm::Treatment, 0, n1, true, grid);
        let c = random_arm(&mut rng, Arm::Control, 0, n0, true, grid);
        let est = rmtif_estimate(&t, &c, tau).unwrap();
        let rmst_of = |d: &ArmDataset| rmst(&fit_km(&TransitionSample::from_dataset(d, 0)).unwrap(), tau).unwrap();
        let diff = rmst_of(&t) - rmst_of(&c);
        worst[0] = worst[0].max((est.overall - diff).abs());
        if !rel_close(est.overall, diff, 1e-12, tau) || !rel_close(est.stages[0], diff, 1e-12, tau) {
            failures[0] += 1;
        }

        // (b) consecutive scores reproduce the AUC difference
        let k = i % 5;
        let t = random_arm(&mut rng, Arm::Treatment, k, n1, true, grid);
        let c = random_arm(&mut rng, Arm::Control, k, n0, true, grid);
        let u = expected_utility_contrast(&t, &c, &UtilitySpec::consecutive(k + 1), tau).unwrap();
        let d = auc_contrast(&t, &c, tau, 0.05).unwrap().difference.estimate;
        let scale = (k as f64 + 1.0) * tau;
        worst[1] = worst[1].max((u.difference - d).abs());
        if !rel_close(u.difference, d, 1e-12, scale) {
            failures[1] += 1;
        }

        // (c) score test equals log-rank without ties
        let t = random_arm(&mut rng, Arm::Treatment, k, n1, true, false);
        let c = random_arm(&mut rng, Arm::Control, k, n0, true, false);
        let comp = to_composite(&t, &c);
        let lr = log_rank_test(&comp).chi_square;
        for ties in [Ties::Efron, Ties::Breslow] {
            let sc = score_test(&comp, ties);
            worst[2] = worst[2].max((sc - lr).abs() / lr.abs().max(1e-300));
            if !rel_close(sc, lr, 1e-12, 0.0) {
                failures[2] += 1;
            }
        }
    }
    outcome(
        failures.iter().all(|&f| f == 0),
        format!(
            "{n_sets} datasets each; (a) K=0 vs RMST diff max gap {:.1e}; (b) utility vs AUC diff max gap {:.1e}; (c) score vs log-rank max rel gap {:.1e}; failures {failures:?}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn five_transition_scenario(seed: u64, n: usize, treated_factor: f64) -> TrialScenario {
    let control = ArmRates {
        progression: vec![0.3, 0.35, 0.4, 0.3, 0.2],
        death: vec![0.03, 0.04, 0.05, 0.06],
    };
    let treated = ArmRates {
        progression: control.progression.iter().map(|r| r * treated_factor).collect(),
        death: control.death.iter().map(|r| r * treated_factor).collect(),
    };
    TrialScenario {
        n_treated: n,
        n_control: n,
        labels: None,
        treated,
        control,
        frailty_variance: 0.5,
        admin_time: 10.0,
        dropout_rate: 0.05,
        assessment_interval: 0.0,
        seed,
    }
}

/// Share of subjects whose follow-up ends by censoring before death and `tau`.
fn censored_share(data: &ArmDataset, tau: f64) -> f64 {
    let n = data
        .subjects()
        .iter()
        .filter(|s| s.censoring_time().is_some_and(|c| c < tau))
        .count();
    n as f64 / data.len() as f64
}

fn c5_if_vs_bootstrap() -> Outcome {
    let tau = 6.0;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut shares = Vec::new();
    for seed in 0..20u64 {
        let mut sc = five_transition_scenario(500 + seed, 500, 0.8);
        sc.dropout_rate = 0.055;
        let trial = simulate_trial(&sc).unwrap();
        for arm in [&trial.treated, &trial.control] {
            shares.push(censored_share(arm, tau));
            let if_se = auc_influence_se(arm, tau).unwrap();
            let draws = bootstrap_arm(arm, 1000, 9000 + seed, |d| auc_point(d, tau).unwrap());
            let boot_se = sample_sd(&draws);
            let rel = (if_se / boot_se - 1.0).abs();
            worst = worst.max(rel);
            if rel > 0.10 {
                failures += 1;
            }
        }
    }
    let lo = shares.iter().cloned().fold(f64::MAX, f64::min);
    let hi = shares.iter().cloned().fold(f64::MIN, f64::max);
    let pooled = shares.iter().sum::<f64>() / shares.len() as f64;
    let censoring_ok = (0.20..=0.30).contains(&pooled);
    outcome(
        failures == 0 && censoring_ok,
        format!(
            "20 seeds x 2 arms, n=500, B=1000, censored {:.1}% (per arm {:.1}%-{:.1}%), worst |IF/boot - 1| = {:.3}, failures {failures}",
            100.0 * pooled,
            100.0 * lo,
            100.0 * hi,
            worst
        ),
    )
}

fn c6_null_coverage() -> Outcome {
    let tau = 4.0;
    let trials = 1000;
    let mut cover = [0usize; 3];
    for i in 0..trials as u64 {
        let mut sc = five_transition_scenario(60_000 + i, 200, 1.0);
        sc.admin_time = 5.0;
        let trial = simulate_trial(&sc).unwrap();
        let auc = auc_contrast(&trial.treated, &trial.control, tau, 0.05).unwrap();
        cover[0] += auc.difference.covers(0.0) as usize;
        cover[1] += auc.ratio.as_ref().is_some_and(|r| r.log_ratio.covers(0.0)) as usize;
        let boot = BootstrapConfig {
            replicates: 300,
            seed: i,
            ci: CiMethod::Normal,
        };
        let rm = rmtif_infer(&trial.treated, &trial.control, tau, boot, 0.05).unwrap();
        cover[2] += rm.overall.covers(0.0) as usize;
    }
    let rates = cover.map(|c| c as f64 / trials as f64);
    let pass = rates.iter().all(|&r| (0.93..=0.97).contains(&r));
    outcome(
        pass,
        format!(
            "{trials} null trials, n=200/arm: coverage D {:.3}, log R {:.3}, RMT-IF {:.3} (target 0.95 +/- 0.02)",
            rates[0], rates[1], rates[2]
        ),
    )
}

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data"))
}

fn c7_effect_recovery() -> Outcome {
    let cfg = SimulationConfig::load(data_dir().join("effect_scenario.toml")).unwrap();
    let committed: TruthTable =
        serde_json::from_str(&std::fs::read_to_string(data_dir().join("effect_truth.json")).unwrap()).unwrap();
    let truth = true_estimands(&cfg.scenario, cfg.tau, cfg.n_mc).unwrap();
    let truth_matches = cfg.n_mc == 1_000_000
        && rel_close(truth.auc_ratio, committed.auc_ratio, 1e-12, 0.0)
        && rel_close(truth.auc_difference, committed.auc_difference, 1e-12, 0.0)
        && rel_close(truth.rmtif_overall, committed.rmtif_overall, 1e-12, 0.0);
    let tau = cfg.tau;
    let reps = 200;
    let mut hits = [0usize; 3];
    for r in 0..reps as u64 {
        let mut sc = cfg.scenario.clone();
        sc.seed = 70_000 + r;
        let trial = simulate_trial(&sc).unwrap();
        let auc = auc_contrast(&trial.treated, &trial.control, tau, 0.05).unwrap();
        let d = &auc.difference;
        hits[0] += ((d.estimate - truth.auc_difference).abs() <= 3.0 * d.se) as usize;
        if let Some(ratio) = &auc.ratio {
            let l = &ratio.log_ratio;
            hits[1] += ((l.estimate - truth.auc_ratio.ln()).abs() <= 3.0 * l.se) as usize;
        }
        let boot = BootstrapConfig {
            replicates: 200,
            seed: r,
            ci: CiMethod::Normal,
        };
        let rm = rmtif_infer(&trial.treated, &trial.control, tau, boot, 0.05).unwrap();
        hits[2] += ((rm.overall.estimate - truth.rmtif_overall).abs() <= 3.0 * rm.overall.se) as usize;
    }
    let recovery_ok = hits.iter().all(|&h| h * 100 >= reps * 99);

    // K = 0: AUC is tau minus the exponential RMST
    let k0 = TrialScenario {
        n_treated: 1,
        n_control: 1,
        labels: None,
        treated: ArmRates {
            progression: vec![0.25],
            death: vec![],
        },
        control: ArmRates {
            progression: vec![0.4],
            death: vec![],
        },
        frailty_variance: 0.0,
        admin_time: 10.0,
        dropout_rate: 0.0,
        assessment_interval: 0.0,
        seed: 77,
    };
    let k0_truth = true_estimands(&k0, tau, 1_000_000).unwrap();
    let closed = |lambda: f64| tau - (1.0 - (-lambda * tau).exp()) / lambda;
    let z1 = (k0_truth.auc_treated - closed(0.25)) / k0_truth.auc_treated_mcse;
    let z0 = (k0_truth.auc_control - closed(0.4)) / k0_truth.auc_control_mcse;
    let analytic_ok = z1.abs() <= 3.0 && z0.abs() <= 3.0;

    outcome(
        truth_matches && recovery_ok && analytic_ok,
        format!(
            "true AUC ratio {:.4} (committed truth reproduced: {truth_matches}); within 3 SE in {reps} reps: D {}, log R {}, RMT-IF {}; K=0 closed form z = {z1:.2}, {z0:.2}",
            truth.auc_ratio, hits[0], hits[1], hits[2]
        ),
    )
}

fn c8_cox_recovery() -> Outcome {
    let reps = 200;
    let target = 0.8f64.ln();
    let mut hits = 0;
    let mut mean_beta = 0.0;
    for r in 0..reps as u64 {
        let sc = TrialScenario {
            n_treated: 2000,
            n_control: 2000,
            labels: None,
            treated: ArmRates {
                progression: vec![0.12, 0.3],
                death: vec![0.08],
            },
            control: ArmRates {
                progression: vec![0.15, 0.3],
                death: vec![0.1],
            },
            frailty_variance: 0.0,
            admin_time: 3.0,
            dropout_rate: 0.05,
            assessment_interval: 0.0,
            seed: 80_000 + r,
        };
        let trial = simulate_trial(&sc).unwrap();
        let fit = fit_cox_hr(&to_composite(&trial.treated, &trial.control), 0.05).unwrap();
        mean_beta += fit.beta / reps as f64;
        hits += ((fit.beta - target).abs() <= 3.0 * fit.se) as usize;
    }
    outcome(
        hits * 100 >= reps * 99,
        format!("{hits}/{reps} replicates within 3 SE of log 0.8; mean beta {mean_beta:.4} (target {target:.4})"),
    )
}

fn renal_scenario(seed: u64) -> TrialScenario {
    let control = ArmRates {
        progression: vec![0.025, 0.8, 0.6, 0.25, 0.1],
        death: vec![0.03, 0.04, 0.05, 0.06],
    };
    let treated = ArmRates {
        progression: vec![0.025 * 1.05, 0.8 * 0.85, 0.6 * 0.85, 0.25 * 0.85, 0.1 * 0.85],
        death: vec![0.03 * 0.83, 0.04 * 0.85, 0.05 * 0.85, 0.06 * 0.85],
    };
    TrialScenario {
        n_treated: 2000,
        n_control: 2000,
        labels: Some(StateSpace::renal().labels().to_vec()),
        treated,
        control,
        frailty_variance: 0.0,
        admin_time: 6.0,
        dropout_rate: 0.02,
        assessment_interval: 0.5,
        seed,
    }
}

fn table4_subsets() -> Vec<EndpointSubset> {
    let all = StateSpace::renal().labels().to_vec();
    let rows: [(&str, usize); 4] = [
        ("All five endpoints", 0),
        ("Exclude 40% decline", 1),
        ("Exclude 40%, 50% declines", 2),
        ("ESRD + death only", 3),
    ];
    rows.iter()
        .map(|&(name, skip)| EndpointSubset {
            name: name.into(),
            keep: all[skip..].to_vec(),
        })
        .collect()
}

fn analysis_config(input: &Path, out: &Path, tau: f64, replicates: usize, sensitivity: Vec<EndpointSubset>) -> AnalysisConfig {
    AnalysisConfig {
        input: input.to_path_buf(),
        output_dir: out.to_path_buf(),
        tau,
        alpha: 0.05,
        endpoints: None,
        scores: None,
        bootstrap: BootstrapConfig {
            replicates,
            seed: 5,
            ci: CiMethod::Normal,
        },
        ties: Ties::Efron,
        sensitivity,
    }
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_burden"))
        .args(args)
        .env_remove("BURDEN_OUT_DIR")
        .output()
        .expect("run burden binary")
}

fn c9_sensitivity_sweep() -> Outcome {
    let tau = 6.0;
    let dir = tempfile::tempdir().unwrap();

    // one trial end to end through the binary
    let sim = SimulationConfig {
        output_dir: dir.path().join("sim"),
        tau,
        n_mc: 100_000,
        scenario: renal_scenario(90_000),
    };
    let sim_path = dir.path().join("sim.toml");
    std::fs::write(&sim_path, toml::to_string(&sim).unwrap()).unwrap();
    let ana = analysis_config(&dir.path().join("sim/data.csv"), &dir.path().join("out"), tau, 100, table4_subsets());
    let ana_path = dir.path().join("analysis.toml");
    std::fs::write(&ana_path, toml::to_string(&ana).unwrap()).unwrap();
    let s = run_cli(&["simulate", sim_path.to_str().unwrap()]);
    let a = run_cli(&["analyze", ana_path.to_str().unwrap()]);
    let mut rdr = csv::Reader::from_path(dir.path().join("out/sensitivity.csv")).unwrap();
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let complete_rows = rows
        .iter()
        .filter(|r| ["cox_hr", "auc_ratio", "rmtif"].iter().all(|c| !r[col(c)].is_empty()))
        .count();
    let cli_ok = s.status.success() && a.status.success() && rows.len() == 4 && complete_rows == 4;

    // stability over replicate trials
    let reps = 50;
    let mut wins = 0;
    let mut all_rows_complete = true;
    let range = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    for r in 0..reps as u64 {
        let trial = simulate_trial(&renal_scenario(91_000 + r)).unwrap();
        let data = TrialData {
            treated: trial.treated,
            control: trial.control,
        };
        let bundle = run_analysis(&ana, &data).unwrap();
        let hr: Vec<f64> = bundle.sensitivity.iter().filter_map(|row| row.cox_hr).collect();
        let ar: Vec<f64> = bundle.sensitivity.iter().filter_map(|row| row.auc_ratio).collect();
        all_rows_complete &= bundle.sensitivity.len() == 4
            && hr.len() == 4
            && ar.len() == 4
            && bundle.sensitivity.iter().all(|row| row.rmtif.is_some());
        wins += (range(&ar) < range(&hr)) as usize;
    }
    outcome(
        cli_ok && all_rows_complete && wins * 100 >= reps * 80,
        format!(
            "CLI report rows {} (complete {complete_rows}); range(AUC ratio) < range(HR) in {wins}/{reps} replicates",
            rows.len()
        ),
    )
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut scenario = renal_scenario(100);
    scenario.n_treated = 300;
    scenario.n_control = 300;
    let mut summaries = Vec::new();
    let mut datasets = Vec::new();
    let mut statuses = true;
    for run in ["a", "b"] {
        let base = dir.path().join(run);
        std::fs::create_dir_all(&base).unwrap();
        let sim = SimulationConfig {
            output_dir: base.join("sim"),
            tau: 6.0,
            n_mc: 100_000,
            scenario: scenario.clone(),
        };
        std::fs::write(base.join("sim.toml"), toml::to_string(&sim).unwrap()).unwrap();
        let ana = analysis_config(&base.join("sim/data.csv"), &base.join("out"), 6.0, 200, table4_subsets());
        std::fs::write(base.join("analysis.toml"), toml::to_string(&ana).unwrap()).unwrap();
        statuses &= run_cli(&["simulate", base.join("sim.toml").to_str().unwrap()]).status.success();
        statuses &= run_cli(&["analyze", base.join("analysis.toml").to_str().unwrap()]).status.success();
        summaries.push(std::fs::read(base.join("out/summary.json")).unwrap());
        datasets.push(std::fs::read(base.join("sim/data.csv")).unwrap());
    }
    let identical = summaries[0] == summaries[1] && datasets[0] == datasets[1];
    outcome(
        statuses && identical,
        format!("two simulate+analyze runs: summary.json {} bytes, identical: {identical}", summaries[0].len()),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "exact small-sample KM/RMST", c1_small_km),
        (2, "AUC identities on fuzzed data", c2_auc_identities),
        (3, "RMT-IF equals pairwise oracle", c3_rmtif_oracle),
        (4, "reductions (K=0 RMT-IF, utility, score test)", c4_reductions),
        (5, "influence-function SE vs bootstrap SE", c5_if_vs_bootstrap),
        (6, "null CI coverage", c6_null_coverage),
        (7, "effect recovery against Monte-Carlo truth", c7_effect_recovery),
        (8, "Cox HR recovery", c8_cox_recovery),
        (9, "endpoint sensitivity sweep", c9_sensitivity_sweep),
        (10, "end-to-end determinism", c10_determinism),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, title, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let status = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} [{status}] {title}: {} ({:.1}s)",
            result.detail,
            start.elapsed().as_secs_f64()
        );
        if !result.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
