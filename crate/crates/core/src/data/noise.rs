use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{constraint, Result};

/// Flips exactly `floor(rate * n)` labels chosen uniformly without
/// replacement. Applying it twice with the same seed restores the input.
pub fn inject_label_noise(train: &Dataset, rate: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=0.5).contains(&rate) {
        return Err(constraint(format!("noise rate {rate} outside [0, 0.5]")));
    }
    let n = train.len();
    let flips = (rate * n as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = train.labels().to_vec();
    for i in sample(&mut rng, n, flips) {
        labels[i] = 1 - labels[i];
    }
    train.with_labels(labels)
}
