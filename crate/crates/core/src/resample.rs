//! Seeded nonparametric bootstrap over subjects.
//!
//! Each replicate draws from its own ChaCha stream derived from the master
//! seed and the replicate index, so output does not depend on how replicates
//! are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::ArmDataset;

pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

pub fn draw_indices<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Applies `stat` to `replicates` resamples of one arm.
pub fn bootstrap_arm<T, F>(data: &ArmDataset, replicates: usize, seed: u64, stat: F) -> Vec<T>
where
    T: Send,
    F: Fn(&ArmDataset) -> T + Sync,
{
    (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = replicate_rng(seed, b as u64);
            let idx = draw_indices(&mut rng, data.len());
            stat(&data.resample(&idx))
        })
        .collect()
}

/// Applies `stat` to `replicates` pairs of independently resampled arms.
pub fn bootstrap_two_arm<T, F>(
    treated: &ArmDataset,
    control: &ArmDataset,
    replicates: usize,
    seed: u64,
    stat: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(&ArmDataset, &ArmDataset) -> T + Sync,
{
    (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = replicate_rng(seed, b as u64);
            let i1 = draw_indices(&mut rng, treated.len());
            let i0 = draw_indices(&mut rng, control.len());
            stat(&treated.resample(&i1), &control.resample(&i0))
        })
        .collect()
}
