#![allow(dead_code)]

use burden::data::{Arm, ArmDataset, StateSpace, SubjectRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random valid arm from a seed: nondecreasing times with skipped-state
/// ties, optional grid rounding and optional censoring.
pub fn random_arm(seed: u64, arm: Arm, k: usize, n: usize, censor: bool, grid: bool) -> ArmDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = k + 1;
    let round = |x: f64| if grid { (x * 4.0).ceil() / 4.0 } else { x };
    let subjects = (0..n)
        .map(|i| {
            let mut t = 0.0;
            let mut times = Vec::with_capacity(m);
            for j in 0..m {
                if j == 0 || !rng.random_bool(0.2) {
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
            SubjectRecord::new(format!("{}{i}", arm.name()), arm, times, events)
        })
        .collect();
    ArmDataset::new(arm, StateSpace::generic(k), subjects).expect("valid random arm")
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
