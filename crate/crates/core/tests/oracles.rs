use burden::data::Arm;
use burden::simulate::{draw_complete_process, simulate_trial, true_estimands, ArmRates, TrialScenario};

/// Survival of a sum of independent exponentials with distinct rates.
fn hypoexponential_survival(rates: &[f64], t: f64) -> f64 {
    rates
        .iter()
        .enumerate()
        .map(|(i, &li)| {
            let w: f64 = rates
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &lj)| lj / (lj - li))
                .product();
            w * (-li * t).exp()
        })
        .sum()
}

fn sequential(rates: &[f64], n: usize) -> TrialScenario {
    TrialScenario {
        n_treated: n,
        n_control: n,
        labels: None,
        treated: ArmRates {
            progression: rates.to_vec(),
            death: vec![],
        },
        control: ArmRates {
            progression: rates.iter().map(|r| r * 1.5).collect(),
            death: vec![],
        },
        frailty_variance: 0.0,
        admin_time: 1e6,
        dropout_rate: 0.0,
        assessment_interval: 0.0,
        seed: 424242,
    }
}

#[test]
fn transition_survival_is_hypoexponential() {
    let rates = [0.3, 0.5, 0.8];
    let n = 100_000;
    let sc = sequential(&rates, n);
    let trial = simulate_trial(&sc).unwrap();
    for (data, scale) in [(&trial.treated, 1.0), (&trial.control, 1.5)] {
        for k in 0..rates.len() {
            let arm_rates: Vec<f64> = rates[..=k].iter().map(|r| r * scale).collect();
            for t in [1.0, 3.0, 5.0] {
                let s = hypoexponential_survival(&arm_rates, t);
                let emp = data.subjects().iter().filter(|r| r.times[k] > t).count() as f64 / n as f64;
                let se = (s * (1.0 - s) / n as f64).sqrt();
                assert!((emp - s).abs() <= 3.0 * se, "k={k} t={t}: empirical {emp}, analytic {s}, se {se}");
            }
        }
    }
}

#[test]
fn hypoexponential_formula_matches_single_rate() {
    assert!((hypoexponential_survival(&[0.7], 2.0) - (-1.4f64).exp()).abs() < 1e-15);
    // Erlang-like limit approached by nearly equal rates
    let near = hypoexponential_survival(&[1.0, 1.0 + 1e-6], 2.0);
    let erlang = (-2.0f64).exp() * (1.0 + 2.0);
    assert!((near - erlang).abs() < 1e-5);
}

#[test]
fn truth_draws_are_complete_and_ordered() {
    let sc = sequential(&[0.3, 0.5, 0.8], 1);
    for i in 0..100 {
        let t = draw_complete_process(&sc, Arm::Treatment, i);
        assert!(t.windows(2).all(|w| w[0] <= w[1]));
        assert!(t.iter().all(|x| x.is_finite() && *x > 0.0));
    }
}

#[test]
fn death_only_truth_matches_closed_form() {
    let tau = 3.0;
    let sc = sequential(&[0.6], 1);
    let truth = true_estimands(&sc, tau, 200_000).unwrap();
    let closed = |l: f64| tau - (1.0 - (-l * tau).exp()) / l;
    assert!((truth.auc_treated - closed(0.6)).abs() <= 3.0 * truth.auc_treated_mcse);
    assert!((truth.auc_control - closed(0.9)).abs() <= 3.0 * truth.auc_control_mcse);
    // K = 0: restricted mean time in favor is the RMST difference
    let rmst = |l: f64| (1.0 - (-l * tau).exp()) / l;
    assert!((truth.rmtif_overall - (rmst(0.6) - rmst(0.9))).abs() <= 3.0 * truth.rmtif_overall_mcse);
    assert_eq!(truth.composite_hazard_ratio, Some(0.6 / (0.6 * 1.5)));
}
